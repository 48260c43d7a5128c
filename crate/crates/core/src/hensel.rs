//! Lifting simple roots from `mod p` to `mod p^e`, one power of `p` at a time.

use crate::error::{Error, Result};
use crate::modring::{PrimePowerModulus, Residue};
use crate::welch::WelchInstance;

/// A root-finding problem: `f` and `f'` must accept residues at any
/// precision `p^k` with `k <= target_exponent` and answer at that precision.
pub struct LiftProblem<F, D> {
    pub f: F,
    pub f_prime: D,
    pub base_root: Residue,
    pub target_exponent: u32,
}

impl<F, D> LiftProblem<F, D>
where
    F: Fn(&Residue) -> Residue,
    D: Fn(&Residue) -> Residue,
{
    pub fn new(f: F, f_prime: D, base_root: Residue, target_exponent: u32) -> Self {
        Self {
            f,
            f_prime,
            base_root,
            target_exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftResult {
    /// The root modulo `p^e`.
    pub root: Residue,
    /// Roots modulo `p^2, ..., p^e`.
    pub trace: Vec<Residue>,
}

/// A pair `(x, c)` modulo `p^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiftedPair {
    pub x: u64,
    pub c: u64,
}

fn precision_ladder(modulus: &PrimePowerModulus, e: u32) -> Result<Vec<PrimePowerModulus>> {
    if e == 0 {
        return Err(Error::ZeroExponent);
    }
    (1..=e).map(|k| modulus.with_exponent(k)).collect()
}

fn lift_on_ladder<F, D>(f: &F, f_prime: &D, base: &Residue, ladder: &[PrimePowerModulus]) -> Result<LiftResult>
where
    F: Fn(&Residue) -> Residue,
    D: Fn(&Residue) -> Residue,
{
    let mut x = base.reinterpret(&ladder[0]);
    if !f(&x).is_zero() {
        return Err(Error::NotARoot);
    }
    if !f_prime(&x).is_unit() {
        return Err(Error::SingularRoot);
    }
    let mut trace = Vec::with_capacity(ladder.len().saturating_sub(1));
    for mk in &ladder[1..] {
        let xk = x.reinterpret(mk);
        let step = &f(&xk) * &f_prime(&xk).inverse()?;
        x = &xk - &step;
        debug_assert!(f(&x).is_zero());
        trace.push(x.clone());
    }
    if !f(&x).is_zero() {
        return Err(Error::LiftFailed(ladder.len() as u32));
    }
    Ok(LiftResult { root: x, trace })
}

/// Newton lifting of a simple root with single-step precision increase.
pub fn lift_simple_root<F, D>(problem: &LiftProblem<F, D>) -> Result<LiftResult>
where
    F: Fn(&Residue) -> Residue,
    D: Fn(&Residue) -> Residue,
{
    let ladder = precision_ladder(problem.base_root.modulus(), problem.target_exponent)?;
    lift_on_ladder(&problem.f, &problem.f_prime, &problem.base_root, &ladder)
}

/// Lifts a root of `x -> prefactor * <g>^x - x` starting from `base` mod `p`.
///
/// `prefactor` is given modulo `p^e`; the derivative is `F(x) log<g> - 1`.
fn lift_fixed_point(instance: &WelchInstance, prefactor: &Residue, base: u64) -> Result<LiftResult> {
    let ladder = instance.ladder();
    let prefs: Vec<Residue> = ladder.iter().map(|s| prefactor.reinterpret(&s.modulus)).collect();
    let eval = |x: &Residue| {
        let k = x.modulus().e() as usize - 1;
        &prefs[k] * &ladder[k].one_unit.pow_unsigned(x.value())
    };
    let f = |x: &Residue| &eval(x) - x;
    let f_prime = |x: &Residue| {
        let k = x.modulus().e() as usize - 1;
        &(&eval(x) * &ladder[k].log) - &ladder[k].modulus.one()
    };
    let moduli: Vec<PrimePowerModulus> = ladder.iter().map(|s| s.modulus.clone()).collect();
    lift_on_ladder(&f, &f_prime, &moduli[0].residue_u64(base), &moduli)
}

/// `omega(g)^x0 <g>^(c-1) (mod p^e)`.
fn odd_prefactor(instance: &WelchInstance, x0: u64, c: i64) -> Residue {
    let d = instance.decomposition();
    let shift = (c as i128 - 1).rem_euclid(instance.pe() as i128) as u64;
    &d.omega().pow_u64(x0) * &d.one_unit().pow_u64(shift)
}

/// The unique `x (mod p^e)` with `omega(g)^x0 <g>^(x-1+c) = x`, for odd `p`.
///
/// The base root is `omega(g)^x0 (mod p)`, where the derivative is `-1`.
pub fn lift_welch_fixed_c(instance: &WelchInstance, x0: u64, c: i64) -> Result<LiftResult> {
    instance.require_odd()?;
    let x0 = x0 % instance.m();
    let prefactor = odd_prefactor(instance, x0, c);
    let base = instance.decomposition().omega().pow_u64(x0).value() % instance.p();
    let base = num_traits::ToPrimitive::to_u64(&base).expect("below p");
    lift_fixed_point(instance, &prefactor, base)
}

/// The unique odd `x (mod 2^e)` with `g^(x-1+c) = x`.
///
/// Since `x` is odd, `x - 1 + c` has the parity of `c`, which fixes the
/// sign `omega(g)^(x-1+c) = ±1` before lifting from `x = 1 (mod 2)`.
pub fn lift_welch_p2(instance: &WelchInstance, c: i64) -> Result<LiftResult> {
    if instance.p() != 2 {
        return Err(Error::TwoRequired);
    }
    let d = instance.decomposition();
    let shift = (c as i128 - 1).rem_euclid(instance.pe() as i128) as u64;
    let mut prefactor = d.one_unit().pow_u64(shift);
    if d.omega_is_minus_one() && c.rem_euclid(2) == 1 {
        prefactor = -prefactor;
    }
    lift_fixed_point(instance, &prefactor, 1)
}

/// All `p^(e-1)` lifts of a root `(x_bar, c_bar) (mod p)` of
/// `omega(g)^x0 <g>^(x-1+c) - x`: one `x` above `x_bar` for every `c` above `c_bar`.
pub fn enumerate_bivariate_lifts(
    instance: &WelchInstance,
    x0: u64,
    base_pair: (u64, u64),
) -> Result<Vec<LiftedPair>> {
    instance.require_odd()?;
    let p = instance.p();
    let x0 = x0 % instance.m();
    let (x_bar, c_bar) = (base_pair.0 % p, base_pair.1 % p);
    // <g> = 1 (mod p), so f(x_bar, c_bar) = omega^x0 - x_bar (mod p).
    let omega_x0 = instance.decomposition().omega().pow_u64(x0).value() % p;
    if omega_x0 != x_bar.into() {
        return Err(Error::NotARoot);
    }
    let mut out = Vec::with_capacity(instance.pe_minus_one() as usize);
    for j in 0..instance.pe_minus_one() {
        let c = c_bar + j * p;
        let lift = lift_fixed_point(instance, &odd_prefactor(instance, x0, c as i64), x_bar)?;
        let x = lift.root.to_u64().expect("below p^e");
        out.push(LiftedPair { x, c });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;

    fn square_minus(a: u64) -> impl Fn(&Residue) -> Residue {
        move |x: &Residue| &(x * x) - &x.modulus().residue_u64(a)
    }

    fn twice(x: &Residue) -> Residue {
        x + x
    }

    #[test]
    fn lifts_square_roots() {
        let base = PrimePowerModulus::new(7, 1).unwrap().residue_u64(3);
        let problem = LiftProblem::new(square_minus(2), twice, base, 2);
        let lifted = lift_simple_root(&problem).unwrap();
        assert_eq!(lifted.root.to_u64(), Some(10));
        assert_eq!(lifted.trace.len(), 1);

        let base = PrimePowerModulus::new(7, 1).unwrap().residue_u64(1);
        let lifted = lift_simple_root(&LiftProblem::new(square_minus(1), twice, base, 2)).unwrap();
        assert_eq!(lifted.root.to_u64(), Some(1));
    }

    #[test]
    fn reports_bad_base_roots() {
        let m = PrimePowerModulus::new(7, 1).unwrap();
        let problem = LiftProblem::new(square_minus(1), twice, m.residue_u64(0), 2);
        assert_eq!(lift_simple_root(&problem).unwrap_err(), Error::NotARoot);
        let problem = LiftProblem::new(square_minus(0), twice, m.residue_u64(0), 2);
        assert_eq!(lift_simple_root(&problem).unwrap_err(), Error::SingularRoot);
    }

    #[test]
    fn fixed_c_lifts_match_direct_scan() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!(lift_welch_fixed_c(&w, 0, 3).unwrap().root.to_u64(), Some(1));

        let w = WelchInstance::new(7, 2, 2).unwrap();
        let x = lift_welch_fixed_c(&w, 1, 1).unwrap().root.to_u64().unwrap();
        assert_eq!(x % 7, 2);
        let hits: Vec<u64> = (0..49u64)
            .filter(|&y| {
                let f = crate::padic::interpolated_f(1, &BigInt::from(y), &BigInt::from(1), w.decomposition()).unwrap();
                f.to_u64() == Some(y) && y % 7 == 2
            })
            .collect();
        assert_eq!(hits, vec![x]);

        let w = WelchInstance::new(11, 3, 1).unwrap();
        assert_eq!(lift_welch_fixed_c(&w, 0, 17).unwrap().root.to_u64(), Some(1));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let w = WelchInstance::new(5, 3, 2).unwrap();
        let d = w.decomposition();
        let f = |x: u64| {
            crate::padic::interpolated_f(1, &BigInt::from(x), &BigInt::from(2), d).unwrap().to_bigint()
                - BigInt::from(x)
        };
        let x = 3u64;
        for k in 1..3u32 {
            let h = 5u64.pow(k);
            let diff = (f(x + h) - f(x)) / BigInt::from(h);
            let fx = crate::padic::interpolated_f(1, &BigInt::from(x), &BigInt::from(2), d).unwrap();
            let analytic = &(&fx * w.log_one_unit()) - &w.modulus().one();
            let m = BigInt::from(5u64.pow(3 - k));
            let lhs = diff.mod_floor(&m);
            let rhs = analytic.to_bigint().mod_floor(&m);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn two_adic_lift() {
        let w = WelchInstance::new(2, 3, 3).unwrap();
        assert_eq!(lift_welch_p2(&w, 1).unwrap().root.to_u64(), Some(3));
        let w = WelchInstance::new(2, 5, 1).unwrap();
        assert_eq!(lift_welch_p2(&w, 4).unwrap().root.to_u64(), Some(1));
    }

    #[test]
    fn bivariate_lift_counts() {
        let w = WelchInstance::new(3, 2, 2).unwrap();
        let omega = w.decomposition().omega().value() % 3u32;
        let x_bar = num_traits::ToPrimitive::to_u64(&omega).unwrap();
        for c_bar in 0..3 {
            let lifts = enumerate_bivariate_lifts(&w, 1, (x_bar, c_bar)).unwrap();
            assert_eq!(lifts.len(), 3);
        }
        let w1 = WelchInstance::new(3, 1, 2).unwrap();
        assert_eq!(enumerate_bivariate_lifts(&w1, 0, (1, 2)).unwrap(), vec![LiftedPair { x: 1, c: 2 }]);
        assert_eq!(enumerate_bivariate_lifts(&w1, 0, (2, 2)).unwrap_err(), Error::NotARoot);
    }
}
