use std::collections::BTreeMap;

use super::report::{Query, SolutionReport, Solutions};
use super::{one_based, SolutionPair, WelchInstance};
use crate::error::{Error, Result};
use crate::hensel::{enumerate_bivariate_lifts, lift_welch_fixed_c, lift_welch_p2};
use crate::modring::crt_u64;

const FIXED_C_THEOREM: &str = "g^(x-1+c) = x (mod p^e) has exactly m solutions x in {1..m*p^e}";
const EXTENDED_THEOREM: &str = "g^(x-1+c) = x (mod p^e) has exactly k*m solutions x in {1..k*m*p^e}";
const PAIRS_THEOREM: &str = "|T_e| = m^2 * p^(e-1) pairs (x, c) in {1..m*p^e} x {1..m*p^(e-1)}";
const P2_THEOREM: &str = "for p = 2 there is exactly one solution x in {1..2^e}, and it is odd";

impl WelchInstance {
    /// The solutions `x in {1..m*p^e}` for fixed `c`, sorted. Works for any `p`.
    pub fn fixed_c_residues(&self, c: i64) -> Result<Vec<i64>> {
        if self.p() == 2 {
            let x = lift_welch_p2(self, c)?.root.to_u64().expect("below 2^e");
            let x = one_based(x as i128, self.pe());
            if x % 2 == 0 || !self.is_solution(x, c) {
                return Err(Error::Inconsistent(format!("2-adic lift gave x = {x} for c = {c}")));
            }
            return Ok(vec![x]);
        }
        let (m, pe) = (self.m(), self.pe());
        let mut xs = Vec::with_capacity(m as usize);
        for x0 in 0..m {
            let x1 = lift_welch_fixed_c(self, x0, c)?.root.to_u64().expect("below p^e");
            // x - 1 + c = x0 (mod m) and x = x1 (mod p^e)
            let r = (x0 as i128 + 1 - c as i128).rem_euclid(m as i128) as u64;
            let x = crt_u64(r, m, x1, pe).expect("m and p^e are coprime");
            let x = one_based(x as i128, self.x_period());
            if !self.is_solution(x, c) {
                return Err(Error::Inconsistent(format!("constructed x = {x} fails for c = {c}")));
            }
            xs.push(x);
        }
        xs.sort_unstable();
        Ok(xs)
    }

    /// Solutions in `{lo..hi}`, extended from one period by `x`-periodicity.
    fn fixed_c_in_range(&self, c: i64, lo: i64, hi: i64) -> Result<Vec<i64>> {
        let period = self.x_period() as i64;
        let base = self.fixed_c_residues(c)?;
        let mut out = Vec::new();
        if lo > hi {
            return Ok(out);
        }
        let first_block = lo.div_euclid(period);
        let last_block = hi.div_euclid(period);
        for block in first_block..=last_block {
            for &r in &base {
                let x = block * period + r;
                if (lo..=hi).contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn range_prediction(&self, lo: i64, hi: i64, per_period: u64) -> Option<(u64, &'static str)> {
        let len = (hi as i128 - lo as i128 + 1).max(0) as u128;
        let period = self.x_period() as u128;
        if len == 0 || len % period != 0 {
            return None;
        }
        let k = (len / period) as u64;
        Some((k * per_period, if k == 1 { "m" } else { "k*m" }))
    }

    /// The `m` solutions in `{1..m*p^e}` for fixed `c`, built by lifting and CRT.
    pub fn solve_fixed_c(&self, c: i64) -> Result<SolutionReport> {
        self.solve_fixed_c_range(c, 1, self.x_period() as i64)
    }

    /// Solutions for fixed `c` in `{lo..hi}`. A count is predicted only when
    /// the range length is a multiple `k` of `m*p^e`.
    pub fn solve_fixed_c_range(&self, c: i64, lo: i64, hi: i64) -> Result<SolutionReport> {
        self.require_odd()?;
        let xs = self.fixed_c_in_range(c, lo, hi)?;
        let prediction = self.range_prediction(lo, hi, self.m());
        let theorem = match prediction {
            Some((_, "k*m")) => EXTENDED_THEOREM,
            _ => FIXED_C_THEOREM,
        };
        Ok(SolutionReport {
            instance: self.summary(),
            query: Query::FixedC { c, x_range: [lo, hi] },
            observed_count: xs.len() as u64,
            solutions: Solutions::Xs(xs),
            predicted_count: prediction.map(|p| p.0),
            predicted_formula: prediction.map(|p| p.1),
            theorem,
        })
    }

    /// The unique odd solution in `{1..2^e}` for `p = 2`.
    pub fn solve_p2(&self, c: i64) -> Result<SolutionReport> {
        self.solve_p2_range(c, 1, self.pe() as i64)
    }

    pub fn solve_p2_range(&self, c: i64, lo: i64, hi: i64) -> Result<SolutionReport> {
        if self.p() != 2 {
            return Err(Error::TwoRequired);
        }
        let xs = self.fixed_c_in_range(c, lo, hi)?;
        let prediction = self.range_prediction(lo, hi, 1);
        Ok(SolutionReport {
            instance: self.summary(),
            query: Query::P2 { c, x_range: [lo, hi] },
            observed_count: xs.len() as u64,
            solutions: Solutions::Xs(xs),
            predicted_count: prediction.map(|p| p.0),
            predicted_formula: prediction.map(|_| "1 per 2^e"),
            theorem: P2_THEOREM,
        })
    }

    /// [`Self::solve_fixed_c_range`] or [`Self::solve_p2_range`] depending on `p`.
    pub fn solve_range(&self, c: i64, lo: i64, hi: i64) -> Result<SolutionReport> {
        if self.p() == 2 {
            self.solve_p2_range(c, lo, hi)
        } else {
            self.solve_fixed_c_range(c, lo, hi)
        }
    }

    /// All solution pairs on the canonical grid, `m^2 p^(e-1)` of them.
    ///
    /// For each class `x0 (mod m)` and each `c_bar (mod p)`, the bivariate
    /// lifts give `(x1, c1) (mod p^e)`; CRT with `c0 (mod m)` places `x` and
    /// `c` modulo `m*p^e`, then `c` is folded modulo `m*p^(e-1)`. Every folded
    /// pair must arise exactly `p` times.
    pub fn solve_all_pairs(&self) -> Result<SolutionReport> {
        self.require_odd()?;
        let (p, m, pe) = (self.p(), self.m(), self.pe());
        let mut seen: BTreeMap<SolutionPair, u64> = BTreeMap::new();
        for x0 in 0..m {
            let x_bar = self.decomposition().omega().pow_u64(x0).value() % p;
            let x_bar = num_traits::ToPrimitive::to_u64(&x_bar).expect("below p");
            for c_bar in 0..p {
                for lift in enumerate_bivariate_lifts(self, x0, (x_bar, c_bar))? {
                    for c0 in 0..m {
                        let xr = (x0 as i128 + 1 - c0 as i128).rem_euclid(m as i128) as u64;
                        let x = crt_u64(xr, m, lift.x, pe).expect("coprime moduli");
                        let c = crt_u64(c0, m, lift.c, pe).expect("coprime moduli");
                        let pair = SolutionPair::new(
                            one_based(x as i128, self.x_period()),
                            one_based(c as i128, self.c_period()),
                        );
                        *seen.entry(pair).or_default() += 1;
                    }
                }
            }
        }
        if let Some((pair, n)) = seen.iter().find(|(_, &n)| n != p) {
            return Err(Error::Inconsistent(format!("pair {pair:?} arose {n} times, expected {p}")));
        }
        let pairs: Vec<SolutionPair> = seen.into_keys().collect();
        if let Some(bad) = pairs.iter().find(|s| !self.is_solution(s.x, s.c)) {
            return Err(Error::Inconsistent(format!("constructed pair {bad:?} is not a solution")));
        }
        let (predicted, formula) = if self.e() == 1 {
            (m * m, "m^2")
        } else {
            (m * m * self.pe_minus_one(), "m^2*p^(e-1)")
        };
        Ok(SolutionReport {
            instance: self.summary(),
            query: Query::AllPairs {
                x_range: [1, self.x_period() as i64],
                c_range: [1, self.c_period() as i64],
            },
            observed_count: pairs.len() as u64,
            solutions: Solutions::Pairs(pairs),
            predicted_count: Some(predicted),
            predicted_formula: Some(formula),
            theorem: PAIRS_THEOREM,
        })
    }
}
