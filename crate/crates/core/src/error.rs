use thiserror::Error;

/// Errors produced by the arithmetic, lifting and solving layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} exceeds the configured bound {bound}")]
    PrimeOutOfBound { p: u64, bound: u64 },
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("negative exponent requires a unit base, got {0}")]
    NonUnitBase(String),
    #[error("{0} is not a unit modulo the prime")]
    NonUnit(String),
    #[error("x = {0} is not a unit modulo the prime")]
    NonUnitX(String),
    #[error("operation requires an odd prime")]
    OddPrimeRequired,
    #[error("operation requires p = 2")]
    TwoRequired,
    #[error("g = {0} is even")]
    EvenG(String),
    #[error("x = {0} is even")]
    EvenX(String),
    #[error("p-adic series outside its convergence domain: {0}")]
    DomainError(String),
    #[error("base value is not a root modulo p")]
    NotARoot,
    #[error("derivative vanishes modulo p at the base root")]
    SingularRoot,
    #[error("lifting failed at precision p^{0}")]
    LiftFailed(u32),
    #[error("g is not a primitive root modulo p^e")]
    NotPrimitiveRoot,
    #[error("({x}, {c}) is not a solution")]
    NotASolution { x: String, c: String },
    #[error("scan exceeds budget: {0}")]
    BudgetExceeded(String),
    #[error("value too large for this operation: {0}")]
    TooLarge(String),
    #[error("moduli differ")]
    ModulusMismatch,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
