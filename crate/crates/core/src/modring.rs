//! Exact arithmetic in the residue ring `Z / p^e Z`.
//!
//! Residue values are arbitrary-precision integers kept in the canonical
//! range `0..p^e`. When the modulus fits in a `u64`, multiplication and
//! powering go through a `u128` fast path; results are identical either way.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default upper bound on the prime accepted by [`PrimePowerModulus::new`].
///
/// Primality and the factorisation of `p - 1` are both done by trial
/// division, so `p` is kept at desk scale.
pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

#[derive(Debug, PartialEq, Eq, Hash)]
struct ModulusInner {
    p: u64,
    e: u32,
    modulus: BigUint,
    small: Option<u64>,
}

/// A prime power `p^e`, the ambient ring of every computation.
///
/// Cloning is cheap (the value is reference counted).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus(Arc<ModulusInner>);

impl PrimePowerModulus {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        Self::with_bound(p, e, DEFAULT_PRIME_BOUND)
    }

    /// Like [`new`](Self::new) with an explicit bound on `p`.
    pub fn with_bound(p: u64, e: u32, bound: u64) -> Result<Self> {
        if p > bound {
            return Err(Error::PrimeOutOfBound { p, bound });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(Self::unchecked(p, e))
    }

    fn unchecked(p: u64, e: u32) -> Self {
        let modulus = BigUint::from(p).pow(e);
        let small = modulus.to_u64();
        Self(Arc::new(ModulusInner { p, e, modulus, small }))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    /// The modulus `p^e`.
    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    pub fn modulus_u64(&self) -> Option<u64> {
        self.0.small
    }

    /// The same prime at another exponent.
    pub fn with_exponent(&self, e: u32) -> Result<Self> {
        if e == 0 {
            return Err(Error::ZeroExponent);
        }
        if e == self.e() {
            return Ok(self.clone());
        }
        Ok(Self::unchecked(self.p(), e))
    }

    /// Order of the unit group, `p^(e-1) (p - 1)`.
    pub fn unit_group_order(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.e() - 1) * (self.p() - 1)
    }

    /// Prime factorisation of [`unit_group_order`](Self::unit_group_order).
    pub fn unit_group_factors(&self) -> Vec<(u64, u32)> {
        let mut factors = factor_u64(self.p() - 1);
        if self.e() > 1 {
            factors.push((self.p(), self.e() - 1));
            factors.sort_unstable();
        }
        factors
    }

    pub fn residue(&self, value: &BigInt) -> Residue {
        let m = BigInt::from_biguint(Sign::Plus, self.modulus().clone());
        let v = value.mod_floor(&m);
        Residue {
            value: v.to_biguint().expect("mod_floor is non-negative"),
            modulus: self.clone(),
        }
    }

    pub fn residue_u64(&self, value: u64) -> Residue {
        self.residue_biguint(&BigUint::from(value))
    }

    pub fn residue_i64(&self, value: i64) -> Residue {
        match self.modulus_u64() {
            Some(m) => self.from_small(value.rem_euclid_u64(m)),
            None => self.residue(&BigInt::from(value)),
        }
    }

    pub fn residue_biguint(&self, value: &BigUint) -> Residue {
        Residue {
            value: value % self.modulus(),
            modulus: self.clone(),
        }
    }

    pub fn one(&self) -> Residue {
        self.residue_u64(1)
    }

    pub fn zero(&self) -> Residue {
        Residue {
            value: BigUint::zero(),
            modulus: self.clone(),
        }
    }

    fn from_small(&self, v: u64) -> Residue {
        Residue {
            value: BigUint::from(v),
            modulus: self.clone(),
        }
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p(), self.e())
    }
}

trait RemEuclidU64 {
    fn rem_euclid_u64(self, m: u64) -> u64;
}

impl RemEuclidU64 for i64 {
    fn rem_euclid_u64(self, m: u64) -> u64 {
        (self as i128).rem_euclid(m as i128) as u64
    }
}

/// An element of `Z / p^e Z` in canonical form `0 <= value < p^e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigUint,
    modulus: PrimePowerModulus,
}

impl Residue {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.value.clone())
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    /// True when `p` does not divide the value.
    pub fn is_unit(&self) -> bool {
        !(&self.value % self.modulus.p()).is_zero()
    }

    /// Reduction to a smaller power of the same prime.
    pub fn reduce_to(&self, target: &PrimePowerModulus) -> Result<Residue> {
        if target.p() != self.modulus.p() || target.e() > self.modulus.e() {
            return Err(Error::ModulusMismatch);
        }
        Ok(target.residue_biguint(&self.value))
    }

    /// The same integer representative read modulo `target`.
    pub fn reinterpret(&self, target: &PrimePowerModulus) -> Residue {
        target.residue_biguint(&self.value)
    }

    /// `self^exponent`; negative exponents go through the inverse.
    pub fn pow(&self, exponent: &BigInt) -> Result<Residue> {
        match exponent.sign() {
            Sign::Minus => {
                let inv = self.inverse().map_err(|_| Error::NonUnitBase(self.value.to_string()))?;
                Ok(inv.pow_unsigned(exponent.magnitude()))
            }
            _ => Ok(self.pow_unsigned(exponent.magnitude())),
        }
    }

    pub fn pow_unsigned(&self, exponent: &BigUint) -> Residue {
        let value = match (self.modulus.modulus_u64(), self.value.to_u64()) {
            (Some(m), Some(b)) => BigUint::from(pow_u64(b, exponent, m)),
            _ => self.value.modpow(exponent, self.modulus.modulus()),
        };
        Residue {
            value,
            modulus: self.modulus.clone(),
        }
    }

    pub fn pow_u64(&self, exponent: u64) -> Residue {
        self.pow_unsigned(&BigUint::from(exponent))
    }

    /// Multiplicative inverse modulo `p^e`.
    pub fn inverse(&self) -> Result<Residue> {
        if !self.is_unit() {
            return Err(Error::NonUnit(self.value.to_string()));
        }
        let value = match (self.modulus.modulus_u64(), self.value.to_u64()) {
            (Some(m), Some(a)) => BigUint::from(inverse_u64(a, m).ok_or_else(|| Error::NonUnit(a.to_string()))?),
            _ => {
                let a = self.to_bigint();
                let m = BigInt::from_biguint(Sign::Plus, self.modulus.modulus().clone());
                let g = a.extended_gcd(&m);
                if !g.gcd.is_one() {
                    return Err(Error::NonUnit(self.value.to_string()));
                }
                g.x.mod_floor(&m).to_biguint().expect("non-negative")
            }
        };
        Ok(Residue {
            value,
            modulus: self.modulus.clone(),
        })
    }

    fn check_same(&self, other: &Residue) {
        assert!(
            self.modulus == other.modulus,
            "residue arithmetic across different moduli ({} vs {})",
            self.modulus,
            other.modulus
        );
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus.modulus())
    }
}

impl Add for &Residue {
    type Output = Residue;

    fn add(self, rhs: &Residue) -> Residue {
        self.check_same(rhs);
        let mut v = &self.value + &rhs.value;
        if &v >= self.modulus.modulus() {
            v -= self.modulus.modulus();
        }
        Residue {
            value: v,
            modulus: self.modulus.clone(),
        }
    }
}

impl Sub for &Residue {
    type Output = Residue;

    fn sub(self, rhs: &Residue) -> Residue {
        self.check_same(rhs);
        let value = if self.value >= rhs.value {
            &self.value - &rhs.value
        } else {
            self.modulus.modulus() - &rhs.value + &self.value
        };
        Residue {
            value,
            modulus: self.modulus.clone(),
        }
    }
}

impl Mul for &Residue {
    type Output = Residue;

    fn mul(self, rhs: &Residue) -> Residue {
        self.check_same(rhs);
        let value = match (self.modulus.modulus_u64(), self.value.to_u64(), rhs.value.to_u64()) {
            (Some(m), Some(a), Some(b)) => BigUint::from(mul_mod(a, b, m)),
            _ => (&self.value * &rhs.value) % self.modulus.modulus(),
        };
        Residue {
            value,
            modulus: self.modulus.clone(),
        }
    }
}

impl Neg for &Residue {
    type Output = Residue;

    fn neg(self) -> Residue {
        if self.value.is_zero() {
            return self.clone();
        }
        Residue {
            value: self.modulus.modulus() - &self.value,
            modulus: self.modulus.clone(),
        }
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        &self + &rhs
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        &self - &rhs
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        &self * &rhs
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        -&self
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    result
}

fn pow_u64(base: u64, exponent: &BigUint, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let base = base % m;
    if let Some(mut e) = exponent.to_u64() {
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(result, b, m);
            }
            b = mul_mod(b, b, m);
            e >>= 1;
        }
        return result;
    }
    for i in (0..exponent.bits()).rev() {
        result = mul_mod(result, result, m);
        if exponent.bit(i) {
            result = mul_mod(result, base, m);
        }
    }
    result
}

pub(crate) fn inverse_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let limit = n.sqrt();
    let mut d = 3;
    while d <= limit {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation by trial division, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `base^exponent mod p^e`.
pub fn mod_pow(base: &Residue, exponent: &BigInt) -> Result<Residue> {
    base.pow(exponent)
}

/// Inverse modulo `p^e`; fails with `NonUnit` when `p | a`.
pub fn mod_inverse(a: &Residue) -> Result<Residue> {
    a.inverse()
}

/// Least `k >= 1` with `g^k = 1 (mod p^e)`.
///
/// Starts from the unit-group order `p^(e-1)(p-1)` and strips prime factors
/// while the power stays at 1.
pub fn multiplicative_order(g: &Residue) -> Result<BigUint> {
    if !g.is_unit() {
        return Err(Error::NonUnit(g.value().to_string()));
    }
    let modulus = g.modulus();
    let mut order = modulus.unit_group_order();
    for (q, k) in modulus.unit_group_factors() {
        for _ in 0..k {
            let candidate = &order / q;
            if g.pow_unsigned(&candidate).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// True iff `g` generates the full unit group of `Z / p^e Z` (odd `p`).
pub fn is_primitive_root(g: &Residue) -> Result<bool> {
    if g.modulus().p() == 2 {
        return Err(Error::OddPrimeRequired);
    }
    Ok(multiplicative_order(g)? == g.modulus().unit_group_order())
}

/// Discrete logarithm of `a` to the base `g`.
///
/// Returns the least `k >= 0` with `g^k = a`, or `None` when `a` is not in
/// the cyclic subgroup generated by `g`. Pohlig–Hellman over the factored
/// order of `g`, with baby-step/giant-step in each prime-order subgroup.
pub fn discrete_log(g: &Residue, a: &Residue) -> Result<Option<BigUint>> {
    if g.modulus() != a.modulus() {
        return Err(Error::ModulusMismatch);
    }
    if !g.is_unit() {
        return Err(Error::NonUnit(g.value().to_string()));
    }
    if !a.is_unit() {
        return Err(Error::NonUnit(a.value().to_string()));
    }
    let order = multiplicative_order(g)?;
    let factors = order_factors(g.modulus(), &order);

    let mut acc = BigUint::zero();
    let mut acc_modulus = BigUint::one();
    for (q, k) in factors {
        let Some(digit) = pohlig_hellman_prime_power(g, a, &order, q, k) else {
            return Ok(None);
        };
        let qk = BigUint::from(q).pow(k);
        acc = match crt(&acc, &acc_modulus, &digit, &qk) {
            Some(v) => v,
            None => return Ok(None),
        };
        acc_modulus *= qk;
    }
    // Elements outside <g> can still produce digits; only a verified
    // exponent counts.
    if g.pow_unsigned(&acc) == *a {
        Ok(Some(acc))
    } else {
        Ok(None)
    }
}

fn order_factors(modulus: &PrimePowerModulus, order: &BigUint) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for (q, _) in modulus.unit_group_factors() {
        let mut n = order.clone();
        let mut k = 0;
        while (&n % q).is_zero() {
            n /= q;
            k += 1;
        }
        if k > 0 {
            out.push((q, k));
        }
    }
    out
}

/// Solves `g^x = a` for `x mod q^k`, where `q^k` exactly divides `order`.
fn pohlig_hellman_prime_power(g: &Residue, a: &Residue, order: &BigUint, q: u64, k: u32) -> Option<BigUint> {
    let gamma = g.pow_unsigned(&(order / q));
    let g_inv = g.inverse().ok()?;
    let mut x = BigUint::zero();
    let mut q_pow = BigUint::one();
    for j in 0..k {
        let shift = g_inv.pow_unsigned(&x);
        let h = (&shift * a).pow_unsigned(&(order / (&q_pow * q)));
        let d = baby_step_giant_step(&gamma, &h, q)?;
        x += &q_pow * d;
        q_pow *= q;
        debug_assert!(j < k);
    }
    Some(x)
}

/// Finds `d` in `0..q` with `gamma^d = h`, where `gamma` has order `q`.
fn baby_step_giant_step(gamma: &Residue, h: &Residue, q: u64) -> Option<u64> {
    let step = (q as f64).sqrt().ceil() as u64;
    let step = step.max(1);
    let mut table: HashMap<BigUint, u64> = HashMap::with_capacity(step as usize);
    let mut cur = gamma.modulus().one();
    for j in 0..step {
        table.entry(cur.value().clone()).or_insert(j);
        cur = &cur * gamma;
    }
    // cur == gamma^step
    let giant = cur.inverse().ok()?;
    let mut y = h.clone();
    for i in 0..=step {
        if let Some(&j) = table.get(y.value()) {
            let d = i * step + j;
            if d < q {
                return Some(d);
            }
        }
        y = &y * &giant;
    }
    None
}

/// Chinese remainder combination of `x = r1 (mod m1)`, `x = r2 (mod m2)`
/// for coprime moduli; returns the representative in `0..m1*m2`.
pub fn crt(r1: &BigUint, m1: &BigUint, r2: &BigUint, m2: &BigUint) -> Option<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, m1.clone());
    let b = BigInt::from_biguint(Sign::Plus, m2.clone());
    let eg = a.extended_gcd(&b);
    if !eg.gcd.is_one() {
        return None;
    }
    let m = &a * &b;
    let r1 = BigInt::from_biguint(Sign::Plus, r1.clone());
    let r2 = BigInt::from_biguint(Sign::Plus, r2.clone());
    // x = r1 + m1 * ((r2 - r1) * m1^-1 mod m2)
    let t = ((&r2 - &r1) * &eg.x).mod_floor(&b);
    (r1 + &a * t).mod_floor(&m).to_biguint()
}

/// `u64` form of [`crt`]; moduli must be coprime and their product fit in `u64`.
pub fn crt_u64(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<u64> {
    let inv = inverse_u64(m1 % m2, m2)?;
    let m = m1.checked_mul(m2)?;
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u128;
    let t = diff * inv as u128 % m2 as u128;
    Some(((r1 as u128 + m1 as u128 * t) % m as u128) as u64)
}
