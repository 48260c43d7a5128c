//! The map `f(x, c) = g^(x-1+c) - x (mod p^e)`, its periodicity, symmetry
//! laws, and constructive solvers with their predicted solution counts.

mod report;
mod solve;
mod symmetry;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modring::{self, multiplicative_order, PrimePowerModulus, Residue};
use crate::padic::{decompose_unit, padic_log, UnitDecomposition};

pub use report::{InstanceSummary, Query, SolutionReport, Solutions};
pub use symmetry::{CCount, ValueSet};

/// A solution `(x, c)` on the canonical grid `x in {1..m*p^e}`, `c in {1..m*p^(e-1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SolutionPair {
    pub x: i64,
    pub c: i64,
}

impl SolutionPair {
    pub fn new(x: i64, c: i64) -> Self {
        Self { x, c }
    }
}

/// Per-precision data used when lifting: the modulus `p^k`, the one-unit
/// `<g>` and `log <g>` reduced modulo `p^k`.
#[derive(Debug, Clone)]
pub(crate) struct LadderStep {
    pub modulus: PrimePowerModulus,
    pub one_unit: Residue,
    pub log: Residue,
}

/// A fixed `(p, e, g)` with the orders of `g` modulo `p` and `p^e`.
#[derive(Debug, Clone)]
pub struct WelchInstance {
    modulus: PrimePowerModulus,
    g: Residue,
    g_small: u64,
    pe: u64,
    m: u64,
    ord_pe: u64,
    decomposition: UnitDecomposition,
    ladder: Vec<LadderStep>,
}

impl WelchInstance {
    /// Builds an instance, rejecting composite `p`, `e = 0` and non-unit `g`.
    ///
    /// The whole index space `{1..m*p^e}` must fit in an `i64`.
    pub fn new(p: u64, e: u32, g: impl Into<BigInt>) -> Result<Self> {
        Self::from_modulus(PrimePowerModulus::new(p, e)?, &g.into())
    }

    pub fn with_bound(p: u64, e: u32, g: impl Into<BigInt>, bound: u64) -> Result<Self> {
        Self::from_modulus(PrimePowerModulus::with_bound(p, e, bound)?, &g.into())
    }

    pub fn from_modulus(modulus: PrimePowerModulus, g: &BigInt) -> Result<Self> {
        let p = modulus.p();
        if g.mod_floor(&BigInt::from(p)).is_zero() {
            return Err(if p == 2 {
                Error::EvenG(g.to_string())
            } else {
                Error::NonUnit(g.to_string())
            });
        }
        let pe = modulus
            .modulus_u64()
            .ok_or_else(|| Error::TooLarge(format!("modulus {modulus}")))?;
        let g_res = modulus.residue(g);
        let g_small = g_res.to_u64().expect("reduced below a u64 modulus");
        let mod_p = modulus.with_exponent(1)?;
        let m = multiplicative_order(&mod_p.residue(g))?
            .to_u64()
            .expect("order below p");
        let ord_pe = multiplicative_order(&g_res)?
            .to_u64()
            .expect("order below p^e");
        if m.checked_mul(pe).filter(|&v| v <= i64::MAX as u64).is_none() {
            return Err(Error::TooLarge(format!("index range m * p^e for {modulus}")));
        }

        let decomposition = decompose_unit(g, &modulus)?;
        let log = padic_log(decomposition.one_unit())?.value().clone();
        let mut ladder = Vec::with_capacity(modulus.e() as usize);
        for k in 1..=modulus.e() {
            let mk = modulus.with_exponent(k)?;
            ladder.push(LadderStep {
                one_unit: decomposition.one_unit().reinterpret(&mk),
                log: log.reinterpret(&mk),
                modulus: mk,
            });
        }

        Ok(Self {
            modulus,
            g: g_res,
            g_small,
            pe,
            m,
            ord_pe,
            decomposition,
            ladder,
        })
    }

    /// The instance for `g^-1 (mod p^e)`.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self.g.inverse()?;
        Self::from_modulus(self.modulus.clone(), &inv.to_bigint())
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn e(&self) -> u32 {
        self.modulus.e()
    }

    /// `p^e` as an integer.
    pub fn pe(&self) -> u64 {
        self.pe
    }

    /// `p^(e-1)`.
    pub fn pe_minus_one(&self) -> u64 {
        self.pe / self.p()
    }

    pub fn g(&self) -> &Residue {
        &self.g
    }

    /// `g` reduced into `{0..p^e-1}`.
    pub fn g_value(&self) -> u64 {
        self.g_small
    }

    /// Order of `g` modulo `p`.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Order of `g` modulo `p^e`.
    pub fn ord_pe(&self) -> u64 {
        self.ord_pe
    }

    /// `p^(e-1) (p-1)`, the order of the unit group.
    pub fn phi(&self) -> u64 {
        self.pe_minus_one() * (self.p() - 1)
    }

    pub fn is_primitive_root(&self) -> bool {
        self.ord_pe == self.phi()
    }

    pub fn decomposition(&self) -> &UnitDecomposition {
        &self.decomposition
    }

    /// `log <g>` modulo `p^e`.
    pub fn log_one_unit(&self) -> &Residue {
        &self.ladder[self.ladder.len() - 1].log
    }

    pub(crate) fn ladder(&self) -> &[LadderStep] {
        &self.ladder
    }

    /// Guaranteed period in `c`: `m * p^(e-1)`. Not necessarily minimal.
    pub fn c_period(&self) -> u64 {
        self.m * self.pe_minus_one()
    }

    /// Period in `x`: `m * p^e`.
    pub fn x_period(&self) -> u64 {
        self.m * self.pe
    }

    /// `g^t (mod p^e)` for any integer `t`.
    pub fn g_pow(&self, t: i128) -> u64 {
        let t = t.rem_euclid(self.ord_pe as i128) as u64;
        modring::pow_mod_u64(self.g_small, t, self.pe)
    }

    /// `f(x, c)` as an integer in `{0..p^e-1}`.
    pub fn f_value(&self, x: i64, c: i64) -> u64 {
        let t = x as i128 - 1 + c as i128;
        let gx = self.g_pow(t);
        let xr = (x as i128).rem_euclid(self.pe as i128) as u64;
        (gx + self.pe - xr) % self.pe
    }

    /// `f(x, c) = g^(x-1+c) - x (mod p^e)`.
    pub fn welch_f(&self, x: i64, c: i64) -> Residue {
        self.modulus.residue_u64(self.f_value(x, c))
    }

    /// `f(x, c)` for arbitrary-size integer arguments.
    pub fn welch_f_big(&self, x: &BigInt, c: &BigInt) -> Residue {
        let t: BigInt = x - 1 + c;
        let t = t.mod_floor(&BigInt::from(self.ord_pe));
        let gx = self.g.pow(&t).expect("non-negative exponent");
        &gx - &self.modulus.residue(x)
    }

    pub fn is_solution(&self, x: i64, c: i64) -> bool {
        self.f_value(x, c) == 0
    }

    pub fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            p: self.p(),
            e: self.e(),
            g: self.g_small,
            m: self.m,
            ord_pe: self.ord_pe,
        }
    }

    /// The full grid `f(x, c)` for `x in {1..rows}`, `c in {1..columns}`.
    pub fn table(&self, rows: u64, columns: u64) -> Vec<Vec<u64>> {
        (1..=rows as i64)
            .map(|x| (1..=columns as i64).map(|c| self.f_value(x, c)).collect())
            .collect()
    }

    pub(crate) fn require_odd(&self) -> Result<()> {
        if self.p() == 2 {
            Err(Error::OddPrimeRequired)
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_solution(&self, pair: SolutionPair) -> Result<()> {
        if self.is_solution(pair.x, pair.c) {
            Ok(())
        } else {
            Err(Error::NotASolution {
                x: pair.x.to_string(),
                c: pair.c.to_string(),
            })
        }
    }
}

/// Reduces `v` into `{1..n}`.
pub(crate) fn one_based(v: i128, n: u64) -> i64 {
    let r = v.rem_euclid(n as i128) as i64;
    if r == 0 {
        n as i64
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_small_table_entries() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!(w.f_value(3, 2), 6);
        assert_eq!(w.f_value(1, 3), 0);
        // 2^9 - 7 = 505 = 1 (mod 7)
        assert_eq!(w.f_value(7, 3), 1);
        let one = WelchInstance::new(7, 2, 1).unwrap();
        assert_eq!(one.f_value(1, 5), 0);
    }

    #[test]
    fn negative_arguments_use_inverse_powers() {
        let w = WelchInstance::new(7, 2, 3).unwrap();
        let direct = w.welch_f_big(&BigInt::from(-10), &BigInt::from(-4));
        assert_eq!(direct, w.welch_f(-10, -4));
        // 3^-15 - (-10) mod 49, checked via 3^15 * 3^-15 = 1
        let g15 = w.g_pow(15);
        let gm15 = w.g_pow(-15);
        assert_eq!(g15 * gm15 % 49, 1);
    }

    #[test]
    fn periods() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!((w.c_period(), w.x_period()), (3, 21));
        let w = WelchInstance::new(3, 2, 2).unwrap();
        assert_eq!((w.c_period(), w.x_period()), (6, 18));
        let w = WelchInstance::new(11, 2, 3).unwrap();
        assert_eq!((w.c_period(), w.ord_pe()), (55, 5));
        let w = WelchInstance::new(2, 3, 3).unwrap();
        assert_eq!(w.x_period(), 8);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(WelchInstance::new(9, 1, 2).unwrap_err(), Error::NotPrime(9));
        assert_eq!(WelchInstance::new(7, 0, 2).unwrap_err(), Error::ZeroExponent);
        assert!(matches!(WelchInstance::new(7, 1, 14), Err(Error::NonUnit(_))));
        assert!(matches!(WelchInstance::new(2, 3, 4), Err(Error::EvenG(_))));
    }

    #[test]
    fn one_based_reduction() {
        assert_eq!(one_based(0, 6), 6);
        assert_eq!(one_based(-1, 6), 5);
        assert_eq!(one_based(13, 6), 1);
    }
}
