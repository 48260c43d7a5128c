//! Truncated p-adic arithmetic at a working precision `N`.
//!
//! A `p`-adic integer is represented by its residue modulo `p^N`, so every
//! result here is exact modulo `p^N`. Provides the Teichmüller splitting of
//! units, the `log`/`exp` series, and the interpolated exponentials used to
//! linearise `x -> g^(x-1+c)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modring::{PrimePowerModulus, Residue};

/// `p`-adic valuation of a non-zero integer.
pub fn valuation(n: &BigUint, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

fn valuation_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn floor_log(n: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut acc = p;
    while acc <= n {
        k += 1;
        acc = match acc.checked_mul(p) {
            Some(a) => a,
            None => break,
        };
    }
    k
}

/// Valuation of a residue, capped at the precision (zero has valuation `N`).
fn residue_valuation(r: &Residue) -> u32 {
    valuation(r.value(), r.modulus().p()).unwrap_or(r.modulus().e())
}

/// A unit `g = omega * one_unit` split into its root-of-unity part and its
/// one-unit part, both modulo `p^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitDecomposition {
    g: Residue,
    omega: Residue,
    one_unit: Residue,
    omega_negative: bool,
}

impl UnitDecomposition {
    pub fn g(&self) -> &Residue {
        &self.g
    }

    /// Teichmüller part: a `(p-1)`-st root of unity (odd `p`) or `±1` (`p = 2`).
    pub fn omega(&self) -> &Residue {
        &self.omega
    }

    /// The part in `1 + pZ_p` (`1 + 4Z_2` when `p = 2`).
    pub fn one_unit(&self) -> &Residue {
        &self.one_unit
    }

    pub fn precision(&self) -> u32 {
        self.g.modulus().e()
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        self.g.modulus()
    }

    /// For `p = 2`: whether `omega = -1`, i.e. `g = 3 (mod 4)`.
    ///
    /// Needed because at precision 1 the residues of `1` and `-1` coincide.
    pub fn omega_is_minus_one(&self) -> bool {
        self.omega_negative
    }
}

/// A series result together with a lower bound on its valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicSeriesValue {
    value: Residue,
    valuation_floor: u32,
}

impl PadicSeriesValue {
    pub fn from_residue(value: Residue) -> Self {
        let valuation_floor = residue_valuation(&value);
        Self { value, valuation_floor }
    }

    pub fn value(&self) -> &Residue {
        &self.value
    }

    pub fn precision(&self) -> u32 {
        self.value.modulus().e()
    }

    pub fn valuation_floor(&self) -> u32 {
        self.valuation_floor
    }
}

fn require_unit(g: &BigInt, p: u64) -> Result<()> {
    if g.mod_floor(&BigInt::from(p)).is_zero() {
        return Err(Error::NonUnit(g.to_string()));
    }
    Ok(())
}

/// The Teichmüller representative of `g` modulo `p^N` (odd `p`).
///
/// Iterates the Frobenius `x -> x^p` `N - 1` times, i.e. returns
/// `g^(p^(N-1)) mod p^N`: the unique `(p-1)`-st root of unity that is
/// congruent to `g` modulo `p`.
pub fn teichmuller(g: &BigInt, modulus: &PrimePowerModulus) -> Result<Residue> {
    let p = modulus.p();
    if p == 2 {
        return Err(Error::OddPrimeRequired);
    }
    require_unit(g, p)?;
    let mut x = modulus.residue(g);
    let frobenius = BigUint::from(p);
    for _ in 1..modulus.e() {
        x = x.pow_unsigned(&frobenius);
    }
    Ok(x)
}

/// Splits the unit `g` as `omega(g) * <g>` modulo `p^N`.
pub fn decompose_unit(g: &BigInt, modulus: &PrimePowerModulus) -> Result<UnitDecomposition> {
    let p = modulus.p();
    require_unit(g, p)?;
    let g_res = modulus.residue(g);
    if p == 2 {
        let negative = g.mod_floor(&BigInt::from(4)) == BigInt::from(3);
        let omega = if negative { -modulus.one() } else { modulus.one() };
        let one_unit = &omega * &g_res;
        return Ok(UnitDecomposition {
            g: g_res,
            omega,
            one_unit,
            omega_negative: negative,
        });
    }
    let omega = teichmuller(g, modulus)?;
    let one_unit = &g_res * &omega.inverse()?;
    Ok(UnitDecomposition {
        g: g_res,
        omega,
        one_unit,
        omega_negative: false,
    })
}

fn log_domain_ok(v: u32, p: u64) -> bool {
    if p == 2 {
        v >= 2
    } else {
        v >= 1
    }
}

/// `log(u)` for a one-unit `u`, exact modulo `p^N`.
///
/// Requires `u = 1 (mod p)`, or `u = 1 (mod 4)` when `p = 2`.
pub fn padic_log(u: &Residue) -> Result<PadicSeriesValue> {
    let modulus = u.modulus();
    let (p, precision) = (modulus.p(), modulus.e());
    let y = u - &modulus.one();
    if y.is_zero() {
        return Ok(PadicSeriesValue {
            value: y,
            valuation_floor: precision,
        });
    }
    let v = residue_valuation(&y);
    if !log_domain_ok(v, p) {
        return Err(Error::DomainError(format!("log needs u = 1 mod {}, got {}", if p == 2 { 4 } else { p }, u)));
    }

    let y_val = y.value();
    let pn = modulus.modulus();
    let cap = 4 * precision as u64 + p;
    let mut sum = BigInt::zero();
    let mut n = 1u64;
    loop {
        // v_p(y^n / n) >= n*v - floor(log_p n), nondecreasing in n.
        if n as i64 * v as i64 - floor_log(n, p) as i64 >= precision as i64 {
            break;
        }
        if n > cap {
            return Err(Error::DomainError("log series did not converge".into()));
        }
        let k = valuation_u64(n, p);
        let p_k = BigUint::from(p).pow(k);
        let work = pn * &p_k;
        let numerator = y_val.modpow(&BigUint::from(n), &work) / &p_k;
        let unit = modulus.residue_u64(n / p.pow(k)).inverse()?;
        let term = BigInt::from((numerator * unit.value()) % pn);
        if n % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        n += 1;
    }
    let value = modulus.residue(&sum);
    let valuation_floor = residue_valuation(&value);
    Ok(PadicSeriesValue { value, valuation_floor })
}

/// `exp(x)` for `x` inside the convergence disk, exact modulo `p^N`.
///
/// Requires `v_p(x) >= 1` (odd `p`) or `v_2(x) >= 2`.
pub fn padic_exp(x: &PadicSeriesValue) -> Result<Residue> {
    let modulus = x.value.modulus();
    let (p, precision) = (modulus.p(), modulus.e());
    if x.value.is_zero() {
        return Ok(modulus.one());
    }
    let v = residue_valuation(&x.value).max(x.valuation_floor);
    if !log_domain_ok(v, p) {
        return Err(Error::DomainError(format!("exp needs valuation >= {}, got {}", if p == 2 { 2 } else { 1 }, v)));
    }

    let x_val = x.value.value();
    let pn = modulus.modulus();
    let cap = 4 * precision as u64 + p;
    let mut sum = BigUint::one();
    // v_p(n!) and the p-free part of n! modulo p^N.
    let mut fact_val = 0u32;
    let mut fact_unit = modulus.one();
    let mut n = 1u64;
    loop {
        // v_p(x^n / n!) >= n*v - (n-1)/(p-1), strictly increasing in n.
        let lhs = (n as i128 * v as i128 - precision as i128) * (p as i128 - 1);
        if lhs >= n as i128 - 1 {
            break;
        }
        if n > cap {
            return Err(Error::DomainError("exp series did not converge".into()));
        }
        let k = valuation_u64(n, p);
        fact_val += k;
        fact_unit = &fact_unit * &modulus.residue_u64(n / p.pow(k));
        let p_k = BigUint::from(p).pow(fact_val);
        let work = pn * &p_k;
        let numerator = x_val.modpow(&BigUint::from(n), &work) / &p_k;
        let inv = fact_unit.inverse()?;
        sum += (numerator * inv.value()) % pn;
        n += 1;
    }
    Ok(modulus.residue_biguint(&sum))
}

/// `omega(g)^x0 * <g>^(x-1+c)`: the interpolation of `g^(x-1+c)` on the
/// residue class `x - 1 + c = x0 (mod m)` (odd `p`).
///
/// Agrees with `g^(x-1+c)` whenever `x - 1 + c = x0` modulo the order of `g`
/// modulo `p`; the caller decides which class `x0` to use.
pub fn interpolated_f(x0: u64, x: &BigInt, c: &BigInt, d: &UnitDecomposition) -> Result<Residue> {
    if d.modulus().p() == 2 {
        return Err(Error::OddPrimeRequired);
    }
    let exponent = x - 1 + c;
    Ok(&d.omega.pow_u64(x0) * &d.one_unit.pow(&exponent)?)
}

/// The two interpolating branches for `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum P2Branch {
    /// `<g>^(x-1+c)`
    F0,
    /// `-<g>^(x-1+c)`
    F1,
}

/// The branch that equals `g^t`: `F1` exactly when `g = 3 (mod 4)` and `t` is odd.
pub fn p2_branch(d: &UnitDecomposition, exponent: &BigInt) -> P2Branch {
    if d.omega_negative && exponent.is_odd() {
        P2Branch::F1
    } else {
        P2Branch::F0
    }
}

/// Evaluates branch `F0` or `F1` at odd `x` (`p = 2`).
pub fn interpolated_f2(branch: P2Branch, x: &BigInt, c: &BigInt, d: &UnitDecomposition) -> Result<Residue> {
    if d.modulus().p() != 2 {
        return Err(Error::TwoRequired);
    }
    if x.is_even() {
        return Err(Error::EvenX(x.to_string()));
    }
    let value = d.one_unit.pow(&(x - 1 + c))?;
    Ok(match branch {
        P2Branch::F0 => value,
        P2Branch::F1 => -value,
    })
}

/// `<g>^t` evaluated as `exp(t * log <g>)`.
///
/// Integer powering gives the same residue; this route exists to check that
/// the series layer and the interpolation agree.
pub fn one_unit_pow_series(d: &UnitDecomposition, exponent: &BigInt) -> Result<Residue> {
    let log = padic_log(&d.one_unit)?;
    let t = d.modulus().residue(exponent);
    padic_exp(&PadicSeriesValue::from_residue(&t * log.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn teichmuller_examples() {
        let m = modulus(7, 2);
        let w2 = teichmuller(&int(2), &m).unwrap();
        assert_eq!(w2.to_u64(), Some(30));
        assert!(w2.pow_u64(3).is_one());
        let w3 = teichmuller(&int(3), &m).unwrap();
        assert_eq!(w3.to_u64(), Some(31));
        assert_eq!(w3.to_u64().unwrap() % 7, 3);
        assert!(w3.pow_u64(6).is_one());
        assert!(teichmuller(&int(1), &modulus(13, 4)).unwrap().is_one());
        assert_eq!(teichmuller(&int(3), &modulus(2, 3)).unwrap_err(), Error::OddPrimeRequired);
        assert!(matches!(teichmuller(&int(14), &m), Err(Error::NonUnit(_))));
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_unit(&int(2), &modulus(7, 2)).unwrap();
        assert_eq!(d.omega().to_u64(), Some(30));
        assert_eq!(d.one_unit().to_u64(), Some(36));
        assert_eq!((d.omega() * d.one_unit()).to_u64(), Some(2));
        assert_eq!(d.one_unit().to_u64().unwrap() % 7, 1);

        let d = decompose_unit(&int(3), &modulus(2, 3)).unwrap();
        assert_eq!(d.omega().to_u64(), Some(7));
        assert_eq!(d.one_unit().to_u64(), Some(5));
        assert!(d.omega_is_minus_one());

        let d = decompose_unit(&int(1), &modulus(5, 3)).unwrap();
        assert!(d.omega().is_one() && d.one_unit().is_one());

        assert!(matches!(decompose_unit(&int(4), &modulus(2, 3)), Err(Error::NonUnit(_))));
    }

    #[test]
    fn log_examples() {
        let m = modulus(7, 3);
        assert!(padic_log(&m.one()).unwrap().value().is_zero());
        let l = padic_log(&m.residue_u64(8)).unwrap();
        assert_eq!(l.value().to_u64(), Some(154));
        assert_eq!(l.valuation_floor(), 1);
        assert!(matches!(padic_log(&modulus(7, 2).residue_u64(6)), Err(Error::DomainError(_))));
        // p = 2 needs u = 1 mod 4
        assert!(matches!(padic_log(&modulus(2, 4).residue_u64(3)), Err(Error::DomainError(_))));
        assert_eq!(padic_log(&modulus(2, 4).residue_u64(5)).unwrap().valuation_floor(), 2);
    }

    #[test]
    fn exp_examples() {
        let m = modulus(7, 3);
        assert!(padic_exp(&PadicSeriesValue::from_residue(m.zero())).unwrap().is_one());
        let e = padic_exp(&PadicSeriesValue::from_residue(m.residue_u64(154))).unwrap();
        assert_eq!(e.to_u64(), Some(8));
        let e = padic_exp(&PadicSeriesValue::from_residue(modulus(7, 2).residue_u64(7))).unwrap();
        assert_eq!(e.to_u64(), Some(8));
        assert!(matches!(
            padic_exp(&PadicSeriesValue::from_residue(m.residue_u64(3))),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            padic_exp(&PadicSeriesValue::from_residue(modulus(2, 5).residue_u64(2))),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn exp_log_roundtrip_small() {
        for (p, n) in [(3, 5), (5, 3), (7, 3), (2, 8), (2, 2), (11, 2)] {
            let m = modulus(p, n);
            let step = if p == 2 { 4 } else { p };
            let mut u = 1u64;
            while u < m.modulus_u64().unwrap() {
                let r = m.residue_u64(u);
                let l = padic_log(&r).unwrap();
                assert_eq!(padic_exp(&l).unwrap(), r, "p={p} N={n} u={u}");
                u += step;
            }
        }
    }

    #[test]
    fn interpolation_examples() {
        let d = decompose_unit(&int(2), &modulus(7, 1)).unwrap();
        assert_eq!(interpolated_f(2, &int(3), &int(2), &d).unwrap().to_u64(), Some(4));
        let d1 = decompose_unit(&int(1), &modulus(5, 2)).unwrap();
        assert!(interpolated_f(0, &int(1), &int(1), &d1).unwrap().is_one());

        let d3 = decompose_unit(&int(3), &modulus(2, 3)).unwrap();
        assert_eq!(interpolated_f2(P2Branch::F1, &int(3), &int(1), &d3).unwrap().to_u64(), Some(3));
        assert!(matches!(
            interpolated_f2(P2Branch::F0, &int(2), &int(1), &d3),
            Err(Error::EvenX(_))
        ));
        let d5 = decompose_unit(&int(5), &modulus(2, 3)).unwrap();
        for t in 0..16 {
            let direct = d5.g().pow_u64(t);
            let f0 = interpolated_f2(P2Branch::F0, &int(1), &int(t as i64), &d5).unwrap();
            assert_eq!(f0, direct);
        }
        assert_eq!(interpolated_f(0, &int(1), &int(1), &d5).unwrap_err(), Error::OddPrimeRequired);
        assert_eq!(interpolated_f2(P2Branch::F0, &int(1), &int(1), &d).unwrap_err(), Error::TwoRequired);
    }

    #[test]
    fn series_power_matches_integer_power() {
        for (p, n, g) in [(7, 3, 2), (5, 4, 3), (2, 6, 3), (2, 6, 5), (3, 5, 2)] {
            let d = decompose_unit(&int(g), &modulus(p, n)).unwrap();
            for t in -20..20 {
                let t = int(t);
                assert_eq!(one_unit_pow_series(&d, &t).unwrap(), d.one_unit().pow(&t).unwrap());
            }
        }
    }
}
