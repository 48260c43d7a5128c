//! Brute-force reference scans built from repeated multiplication only.
//!
//! Nothing here calls the lifting, CRT or series code; orders and logs are
//! found by walking powers. Scans larger than the [`ScanBudget`] are refused.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::welch::{SolutionPair, WelchInstance};

/// Environment variable overriding the default budget: `MAX_MODULUS[,MAX_GRID]`.
pub const BUDGET_ENV: &str = "WELCH_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanBudget {
    /// Largest `p^e` a scan may work modulo.
    pub max_modulus: u64,
    /// Largest number of `(x, c)` cells a scan may visit.
    pub max_grid: u64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        Self {
            max_modulus: 10_000,
            max_grid: 10_000_000,
        }
    }
}

impl ScanBudget {
    pub fn new(max_modulus: u64, max_grid: u64) -> Self {
        Self { max_modulus, max_grid }
    }

    /// Parses `MAX_MODULUS` or `MAX_MODULUS,MAX_GRID`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Inconsistent(format!("bad budget {spec:?}, expected MAX_MODULUS[,MAX_GRID]"));
        let mut parts = spec.split(',').map(str::trim);
        let max_modulus = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let max_grid = match parts.next() {
            Some(s) => s.parse().map_err(|_| bad())?,
            None => Self::default().max_grid,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self { max_modulus, max_grid })
    }

    /// The default budget, overridden by `WELCH_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(s) => Self::parse(&s),
            Err(_) => Ok(Self::default()),
        }
    }

    fn check_modulus(&self, pe: u64) -> Result<()> {
        if pe > self.max_modulus {
            return Err(Error::BudgetExceeded(format!("modulus {pe} > {}", self.max_modulus)));
        }
        Ok(())
    }

    fn check_grid(&self, cells: u128) -> Result<()> {
        if cells > self.max_grid as u128 {
            return Err(Error::BudgetExceeded(format!("{cells} cells > {}", self.max_grid)));
        }
        Ok(())
    }
}

#[inline]
fn mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Least `k >= 1` with `g^k = 1 (mod modulus)`, by walking powers.
pub fn scan_order(g: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 1;
    }
    let g = g % modulus;
    let mut v = g;
    let mut k = 1;
    while v != 1 {
        v = mul(v, g, modulus);
        k += 1;
        assert!(k <= modulus, "{g} is not a unit modulo {modulus}");
    }
    k
}

/// `g^t (mod modulus)` for `t >= 0` by repeated multiplication.
fn walk_pow(g: u64, t: u64, modulus: u64) -> u64 {
    let mut v = 1 % modulus;
    for _ in 0..t {
        v = mul(v, g, modulus);
    }
    v
}

/// Smallest `k >= 0` with `g^k = a (mod modulus)`, if any.
pub fn scan_discrete_log(g: u64, a: u64, modulus: u64) -> Option<u64> {
    let (g, a) = (g % modulus, a % modulus);
    let mut v = 1 % modulus;
    let mut k = 0;
    loop {
        if v == a {
            return Some(k);
        }
        v = mul(v, g, modulus);
        k += 1;
        if v == 1 % modulus || k > modulus {
            return None;
        }
    }
}

struct Scan {
    p: u64,
    pe: u64,
    g: u64,
    m: u64,
    ord: u64,
}

impl Scan {
    fn new(w: &WelchInstance, budget: &ScanBudget) -> Result<Self> {
        let (p, pe) = (w.p(), w.pe());
        budget.check_modulus(pe)?;
        let g = w.g_value();
        Ok(Self {
            p,
            pe,
            g,
            m: scan_order(g % p, p),
            ord: scan_order(g, pe),
        })
    }

    fn x_period(&self) -> u64 {
        self.m * self.pe
    }

    fn c_period(&self) -> u64 {
        self.m * self.pe / self.p
    }

    /// `g^t` for any integer `t`, reducing `t` by the scanned order.
    fn pow(&self, t: i128) -> u64 {
        walk_pow(self.g, t.rem_euclid(self.ord as i128) as u64, self.pe)
    }

    fn reduce(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.pe as i128) as u64
    }
}

/// Cross-check of the orders an instance reports against scanned ones.
pub fn scan_orders(w: &WelchInstance, budget: &ScanBudget) -> Result<(u64, u64)> {
    let s = Scan::new(w, budget)?;
    Ok((s.m, s.ord))
}

/// All `x in {lo..hi}` with `g^(x-1+c) = x (mod p^e)`, by direct evaluation.
pub fn scan_fixed_c(w: &WelchInstance, c: i64, x_range: (i64, i64), budget: &ScanBudget) -> Result<Vec<i64>> {
    let s = Scan::new(w, budget)?;
    let (lo, hi) = x_range;
    if lo > hi {
        return Ok(Vec::new());
    }
    budget.check_grid((hi as i128 - lo as i128 + 1) as u128)?;
    let mut v = s.pow(lo as i128 - 1 + c as i128);
    let mut out = Vec::new();
    for x in lo..=hi {
        if v == s.reduce(x) {
            out.push(x);
        }
        v = mul(v, s.g, s.pe);
    }
    Ok(out)
}

/// Every solution pair on the grid `{1..m*p^e} x {1..m*p^(e-1)}`.
pub fn scan_all_pairs(w: &WelchInstance, budget: &ScanBudget) -> Result<Vec<SolutionPair>> {
    let s = Scan::new(w, budget)?;
    budget.check_grid(s.x_period() as u128 * s.c_period() as u128)?;
    let mut out = Vec::new();
    for c in 1..=s.c_period() as i64 {
        let mut v = s.pow(c as i128);
        for x in 1..=s.x_period() as i64 {
            if v == s.reduce(x) {
                out.push(SolutionPair::new(x, c));
            }
            v = mul(v, s.g, s.pe);
        }
    }
    out.sort();
    Ok(out)
}

/// The same set as [`scan_all_pairs`], found through a table of powers of `g`:
/// each `x` with `g^k = x` contributes every `c = k - x + 1 (mod ord)`.
///
/// Costs `O(m*p^e)` rather than the full grid.
pub fn scan_pairs_by_table(w: &WelchInstance, budget: &ScanBudget) -> Result<Vec<SolutionPair>> {
    let s = Scan::new(w, budget)?;
    let mut log: HashMap<u64, u64> = HashMap::with_capacity(s.ord as usize);
    let mut v = 1 % s.pe;
    for k in 0..s.ord {
        log.insert(v, k);
        v = mul(v, s.g, s.pe);
    }
    let mut out = Vec::new();
    for x in 1..=s.x_period() as i64 {
        if let Some(&k) = log.get(&s.reduce(x)) {
            let first = (k as i128 - x as i128 + 1).rem_euclid(s.ord as i128) as i64;
            let mut c = if first == 0 { s.ord as i64 } else { first };
            while c <= s.c_period() as i64 {
                out.push(SolutionPair::new(x, c));
                c += s.ord as i64;
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `{f(p, c) mod p : 1 <= c <= m}` by direct evaluation.
pub fn scan_value_set(w: &WelchInstance, budget: &ScanBudget) -> Result<BTreeSet<u64>> {
    let s = Scan::new(w, budget)?;
    Ok((1..=s.m as i64)
        .map(|c| {
            let f = (s.pow(s.p as i128 - 1 + c as i128) + s.pe - s.reduce(s.p as i64)) % s.pe;
            f % s.p
        })
        .collect())
}

/// The `c in {1..m*p^(e-1)}` solving the equation at fixed `x`.
pub fn scan_c_for_fixed_x(w: &WelchInstance, x: i64, budget: &ScanBudget) -> Result<Vec<i64>> {
    let s = Scan::new(w, budget)?;
    budget.check_grid(s.c_period() as u128)?;
    let target = s.reduce(x);
    let mut v = s.pow(x as i128);
    let mut out = Vec::new();
    for c in 1..=s.c_period() as i64 {
        if v == target {
            out.push(c);
        }
        v = mul(v, s.g, s.pe);
    }
    Ok(out)
}

/// Every `(x, c)` with `f(x, c) = f(x + 1, c)` on the period grid.
pub fn scan_doubles(w: &WelchInstance, budget: &ScanBudget) -> Result<Vec<SolutionPair>> {
    let s = Scan::new(w, budget)?;
    budget.check_grid(s.x_period() as u128 * s.c_period() as u128)?;
    let mut out = Vec::new();
    for c in 1..=s.c_period() as i64 {
        let mut v = s.pow(c as i128);
        for x in 1..=s.x_period() as i64 {
            let next = mul(v, s.g, s.pe);
            let f = (v + s.pe - s.reduce(x)) % s.pe;
            let f_next = (next + s.pe - s.reduce(x + 1)) % s.pe;
            if f == f_next {
                out.push(SolutionPair::new(x, c));
            }
            v = next;
        }
    }
    out.sort();
    Ok(out)
}

/// The root of unity congruent to `g (mod p)` modulo `p^e`, found by scanning
/// `y = g (mod p)` for `y^(p-1) = 1` (odd `p`).
pub fn scan_teichmuller(p: u64, pe: u64, g: u64) -> u64 {
    let mut y = g % p;
    while y < pe {
        if walk_pow(y, p - 1, pe) == 1 {
            return y;
        }
        y += p;
    }
    unreachable!("every unit has a Teichmüller representative")
}

/// All `(x, c) (mod p^e)` with `omega(g)^x0 <g>^(x-1+c) = x`, with `omega`
/// and `<g>` recomputed by scanning (odd `p`).
pub fn scan_interpolated_pairs(w: &WelchInstance, x0: u64, budget: &ScanBudget) -> Result<Vec<(u64, u64)>> {
    let s = Scan::new(w, budget)?;
    if s.p == 2 {
        return Err(Error::OddPrimeRequired);
    }
    budget.check_grid(s.pe as u128 * s.pe as u128)?;
    let omega = scan_teichmuller(s.p, s.pe, s.g);
    let omega_inv = walk_pow(omega, scan_order(omega, s.pe) - 1, s.pe);
    let one_unit = mul(s.g, omega_inv, s.pe);
    // <g> has order dividing p^(e-1), so exponents may be taken mod p^e.
    let mut powers = Vec::with_capacity(s.pe as usize);
    let mut v = 1 % s.pe;
    for _ in 0..s.pe {
        powers.push(v);
        v = mul(v, one_unit, s.pe);
    }
    let lead = walk_pow(omega, x0 % s.m, s.pe);
    let mut out = Vec::new();
    for x in 0..s.pe {
        for c in 0..s.pe {
            let t = ((x + c + s.pe - 1) % s.pe) as usize;
            if mul(lead, powers[t], s.pe) == x {
                out.push((x, c));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> ScanBudget {
        ScanBudget::default()
    }

    #[test]
    fn fixed_c_scans() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!(scan_fixed_c(&w, 3, (1, 21), &budget()).unwrap(), vec![1, 2, 18]);
        let w = WelchInstance::new(2, 3, 3).unwrap();
        assert_eq!(scan_fixed_c(&w, 1, (1, 8), &budget()).unwrap(), vec![3]);
        let w = WelchInstance::new(5, 2, 1).unwrap();
        assert_eq!(scan_fixed_c(&w, 4, (1, 25), &budget()).unwrap(), vec![1]);
    }

    #[test]
    fn pair_scans_agree() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        let pairs = scan_all_pairs(&w, &budget()).unwrap();
        assert_eq!(pairs.len(), 9);
        assert_eq!(pairs, scan_pairs_by_table(&w, &budget()).unwrap());
        let w = WelchInstance::new(3, 2, 2).unwrap();
        assert_eq!(scan_all_pairs(&w, &budget()).unwrap().len(), 12);
        let w = WelchInstance::new(11, 2, 3).unwrap();
        assert_eq!(scan_all_pairs(&w, &budget()).unwrap(), scan_pairs_by_table(&w, &budget()).unwrap());
    }

    #[test]
    fn value_set_scans() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!(scan_value_set(&w, &budget()).unwrap(), [1, 2, 4].into_iter().collect());
        let w = WelchInstance::new(7, 1, 5).unwrap();
        assert_eq!(scan_value_set(&w, &budget()).unwrap(), (1..=6).collect());
    }

    #[test]
    fn discrete_log_scans() {
        assert_eq!(scan_discrete_log(3, 2, 121), None);
        assert_eq!(scan_discrete_log(3, 81, 121), Some(4));
        assert_eq!(scan_discrete_log(5, 1, 49), Some(0));
        assert_eq!(scan_order(3, 121), 5);
    }

    #[test]
    fn budget_is_enforced() {
        let w = WelchInstance::new(101, 2, 2).unwrap();
        let small = ScanBudget::new(1000, 10);
        assert!(matches!(scan_fixed_c(&w, 1, (1, 5), &small), Err(Error::BudgetExceeded(_))));
        let w = WelchInstance::new(7, 1, 3).unwrap();
        assert!(matches!(scan_all_pairs(&w, &small), Err(Error::BudgetExceeded(_))));
        assert_eq!(ScanBudget::parse("500").unwrap(), ScanBudget::new(500, 10_000_000));
        assert_eq!(ScanBudget::parse("500, 20").unwrap(), ScanBudget::new(500, 20));
        assert!(ScanBudget::parse("x").is_err());
    }

    #[test]
    fn teichmuller_scan() {
        assert_eq!(scan_teichmuller(7, 49, 2), 30);
        assert_eq!(scan_teichmuller(7, 49, 3), 31);
    }
}
