use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{one_based, SolutionPair, WelchInstance};
use crate::error::{Error, Result};
use crate::modring::{self, discrete_log};

/// `{f(p, c) mod p : 1 <= c <= m}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueSet {
    pub values: BTreeSet<u64>,
    pub generating_c_range: [u64; 2],
}

/// The `c` values in `{1..m*p^(e-1)}` solving the equation for one `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CCount {
    pub x: i64,
    pub count: u64,
    /// `log_g(x)` modulo `ord_pe`, when it exists.
    pub log: Option<u64>,
    pub cs: Vec<i64>,
}

/// Upper bound on grid cells visited by [`WelchInstance::find_doubles`].
pub const MAX_DOUBLES_GRID: u64 = 100_000_000;

impl WelchInstance {
    fn g_mod_p(&self) -> u64 {
        self.g_value() % self.p()
    }

    /// `{f(p, c) mod p : 1 <= c <= m}`, which equals `{g^c mod p}`.
    pub fn value_set_at_p(&self) -> Result<ValueSet> {
        self.require_odd()?;
        let p = self.p();
        let values = (1..=self.m())
            .map(|c| modring::pow_mod_u64(self.g_mod_p(), p - 1 + c, p))
            .collect();
        Ok(ValueSet {
            values,
            generating_c_range: [1, self.m()],
        })
    }

    /// All `c' in {1..m}` with `g^(x-1+c') = x (mod p)`.
    pub fn cs_mod_p(&self, x: i64) -> Vec<u64> {
        let p = self.p();
        let xr = (x as i128).rem_euclid(p as i128) as u64;
        (1..=self.m())
            .filter(|&c| {
                let t = (x as i128 - 1 + c as i128).rem_euclid(self.m() as i128) as u64;
                modring::pow_mod_u64(self.g_mod_p(), t, p) == xr
            })
            .collect()
    }

    /// Residues `x (mod p)` that admit a solution modulo `p`, each with its
    /// unique `c' in {1..m}`, found by search.
    ///
    /// Errors with `Inconsistent` if the solvable residues differ from the
    /// value set or some `c'` is not unique.
    pub fn solution_xs_mod_p(&self) -> Result<Vec<(u64, u64)>> {
        let value_set = self.value_set_at_p()?;
        let mut out = Vec::new();
        for x in 0..self.p() {
            let cs = self.cs_mod_p(x as i64);
            match cs.len() {
                0 => {}
                1 => out.push((x, cs[0])),
                n => return Err(Error::Inconsistent(format!("x = {x} has {n} solutions c mod m"))),
            }
        }
        let xs: BTreeSet<u64> = out.iter().map(|&(x, _)| x).collect();
        if xs != value_set.values {
            return Err(Error::Inconsistent("solvable residues differ from the value set".into()));
        }
        Ok(out)
    }

    fn require_primitive_root(&self) -> Result<()> {
        if self.is_primitive_root() {
            Ok(())
        } else {
            Err(Error::NotPrimitiveRoot)
        }
    }

    fn require_unit_x(&self, x: i64) -> Result<()> {
        if (x as i128).rem_euclid(self.p() as i128) == 0 {
            Err(Error::NonUnitX(x.to_string()))
        } else {
            Ok(())
        }
    }

    fn log_of(&self, x: i64) -> Result<Option<u64>> {
        let a = self.modulus().residue_i64(x);
        Ok(discrete_log(self.g(), &a)?.map(|k| k.to_u64().expect("below ord_pe")))
    }

    /// For a primitive root `g`: the unique `c in {1..phi}` with
    /// `g^(x-1+c) = x (mod p^e)`, namely `c = k + 1 - x` where `g^k = x`.
    pub fn unique_c_for_x(&self, x: i64) -> Result<i64> {
        self.require_primitive_root()?;
        self.require_unit_x(x)?;
        let k = self.log_of(x)?.ok_or(Error::NotPrimitiveRoot)?;
        let c = one_based(k as i128 + 1 - x as i128, self.phi());
        self.require_solution(SolutionPair::new(x, c))?;
        Ok(c)
    }

    /// `(p^(e-1) (p-3) + 4) / 2`, the `c` paired with `x = p^e - 1`.
    pub fn reflection_constant(&self) -> Result<i64> {
        self.require_odd()?;
        Ok(((self.pe_minus_one() * (self.p() - 3) + 4) / 2) as i64)
    }

    /// Maps a solution `(x, c)` for `g` to the solution `(p^e - x, K - c)` for `g^-1`.
    ///
    /// `p^e - x` is reduced into `{1..m*p^e}` (valid by `x`-periodicity) and
    /// `K - c` into `{1..phi}`.
    pub fn inverse_pair(&self, pair: SolutionPair) -> Result<SolutionPair> {
        self.require_odd()?;
        self.require_primitive_root()?;
        self.require_solution(pair)?;
        let inv = self.inverse()?;
        let x = one_based(self.pe() as i128 - pair.x as i128, self.x_period());
        let c = one_based(self.reflection_constant()? as i128 - pair.c as i128, self.phi());
        let image = SolutionPair::new(x, c);
        inv.require_solution(image)
            .map_err(|_| Error::Inconsistent(format!("reflected pair {image:?} fails for g^-1")))?;
        Ok(image)
    }

    /// `-f_{g^-1}(p^(e+1) - x, K - c)`, which equals `f_g(x, c)` for a primitive root.
    pub fn reflected_value(&self, x: i64, c: i64) -> Result<u64> {
        self.require_primitive_root()?;
        let inv = self.inverse()?;
        let xr = (self.pe() as i128 * self.p() as i128 - x as i128) as i64;
        let cr = self.reflection_constant()? - c;
        let v = inv.f_value(xr, cr);
        Ok((self.pe() - v) % self.pe())
    }

    /// `(x + n p^e, c - n p^(e-1))`, reduced into the canonical grid.
    pub fn shift_solution(&self, pair: SolutionPair, n: i64) -> Result<SolutionPair> {
        self.require_solution(pair)?;
        let x = pair.x as i128 + n as i128 * self.pe() as i128;
        let c = pair.c as i128 - n as i128 * self.pe_minus_one() as i128;
        let image = SolutionPair::new(one_based(x, self.x_period()), one_based(c, self.c_period()));
        self.require_solution(image)
            .map_err(|_| Error::Inconsistent(format!("shifted pair {image:?} is not a solution")))?;
        Ok(image)
    }

    /// The `c in {1..m*p^(e-1)}` solving the equation at a fixed unit `x`:
    /// `c = log_g(x) - x + 1 (mod ord_pe)` if the log exists, none otherwise.
    pub fn count_c_for_fixed_x(&self, x: i64) -> Result<CCount> {
        self.require_unit_x(x)?;
        let log = self.log_of(x)?;
        let mut cs = Vec::new();
        if let Some(k) = log {
            let ord = self.ord_pe() as i128;
            let first = (k as i128 - x as i128 + 1).rem_euclid(ord);
            let first = if first == 0 { ord } else { first };
            let mut c = first;
            while c <= self.c_period() as i128 {
                cs.push(c as i64);
                c += ord;
            }
        }
        Ok(CCount {
            x,
            count: cs.len() as u64,
            log,
            cs,
        })
    }

    /// Every `(x, c)` in one period grid with `f(x, c) = f(x + 1, c)`.
    ///
    /// Each one is checked against `g^(x-1+c) (g - 1) = 1 (mod p^e)`.
    pub fn find_doubles(&self) -> Result<Vec<SolutionPair>> {
        let cells = self.x_period() as u128 * self.c_period() as u128;
        if cells > MAX_DOUBLES_GRID as u128 {
            return Err(Error::TooLarge(format!("{cells} grid cells")));
        }
        let pe = self.pe();
        let gm1 = (self.g_value() + pe - 1) % pe;
        let mut out = Vec::new();
        for c in 1..=self.c_period() as i64 {
            for x in 1..=self.x_period() as i64 {
                if self.f_value(x, c) == self.f_value(x + 1, c) {
                    let t = self.g_pow(x as i128 - 1 + c as i128);
                    if modring::mul_mod(t, gm1, pe) != 1 % pe {
                        return Err(Error::Inconsistent(format!("double ({x}, {c}) fails the rearranged form")));
                    }
                    out.push(SolutionPair::new(x, c));
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn value_sets() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!(w.value_set_at_p().unwrap().values, set(&[1, 2, 4]));
        let w = WelchInstance::new(7, 1, 3).unwrap();
        assert_eq!(w.value_set_at_p().unwrap().values, set(&[1, 2, 3, 4, 5, 6]));
        let w = WelchInstance::new(11, 2, 1).unwrap();
        assert_eq!(w.value_set_at_p().unwrap().values, set(&[1]));
        let w = WelchInstance::new(2, 3, 3).unwrap();
        assert_eq!(w.value_set_at_p().unwrap_err(), Error::OddPrimeRequired);
    }

    #[test]
    fn solvable_residues_mod_p() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!(w.solution_xs_mod_p().unwrap(), vec![(1, 3), (2, 3), (4, 2)]);
        let w = WelchInstance::new(7, 1, 3).unwrap();
        let xs: Vec<u64> = w.solution_xs_mod_p().unwrap().iter().map(|s| s.0).collect();
        assert_eq!(xs, vec![1, 2, 3, 4, 5, 6]);
        assert!(w.cs_mod_p(7).is_empty());
    }

    #[test]
    fn unique_c_examples() {
        let w = WelchInstance::new(7, 1, 3).unwrap();
        assert_eq!(w.unique_c_for_x(6).unwrap(), 4);
        assert_eq!(w.unique_c_for_x(1).unwrap(), 6);
        assert_eq!(w.reflection_constant().unwrap(), 4);
        assert!(matches!(w.unique_c_for_x(14), Err(Error::NonUnitX(_))));
        let w = WelchInstance::new(7, 1, 2).unwrap();
        assert_eq!(w.unique_c_for_x(1).unwrap_err(), Error::NotPrimitiveRoot);
    }

    #[test]
    fn inverse_pair_examples() {
        let w = WelchInstance::new(7, 1, 3).unwrap();
        assert_eq!(w.inverse().unwrap().g_value(), 5);
        assert_eq!(w.inverse_pair(SolutionPair::new(2, 1)).unwrap(), SolutionPair::new(5, 3));
        assert_eq!(w.inverse_pair(SolutionPair::new(6, 4)).unwrap(), SolutionPair::new(1, 6));
        assert!(matches!(
            w.inverse_pair(SolutionPair::new(2, 2)),
            Err(Error::NotASolution { .. })
        ));
        let back = w.inverse().unwrap().inverse_pair(SolutionPair::new(5, 3)).unwrap();
        assert_eq!(back, SolutionPair::new(2, 1));
    }

    #[test]
    fn shift_examples() {
        let w = WelchInstance::new(7, 1, 2).unwrap();
        let pair = SolutionPair::new(1, 3);
        assert_eq!(w.shift_solution(pair, 0).unwrap(), pair);
        assert_eq!(w.shift_solution(pair, 1).unwrap(), SolutionPair::new(8, 2));
        assert_eq!(w.shift_solution(pair, 3).unwrap().c, 3);
    }

    #[test]
    fn c_counts() {
        let w = WelchInstance::new(11, 2, 3).unwrap();
        let one = w.count_c_for_fixed_x(1).unwrap();
        assert_eq!(one.count, 11);
        assert!(one.cs.iter().all(|c| c % 5 == 0));
        assert_eq!(w.count_c_for_fixed_x(2).unwrap().count, 0);
        let w = WelchInstance::new(7, 2, 3).unwrap();
        assert_eq!(w.count_c_for_fixed_x(10).unwrap().count, 1);
    }

    #[test]
    fn doubles() {
        assert!(WelchInstance::new(7, 2, 1).unwrap().find_doubles().unwrap().is_empty());
        let w = WelchInstance::new(7, 1, 3).unwrap();
        let doubles = w.find_doubles().unwrap();
        // 3^t * 2 = 1 (mod 7) means 3^t = 4, t = 4 (mod 6)
        let expected: Vec<SolutionPair> = (1..=6)
            .flat_map(|c| (1..=42).map(move |x| SolutionPair::new(x, c)))
            .filter(|s| (s.x - 1 + s.c).rem_euclid(6) == 4)
            .filter(|s| s.x <= 42 && s.c <= 6)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(doubles, expected);
    }
}
