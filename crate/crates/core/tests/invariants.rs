use proptest::prelude::*;
use welch_core::oracle::{scan_c_for_fixed_x, scan_fixed_c, scan_order, ScanBudget};
use welch_core::welch::Solutions;
use welch_core::WelchInstance;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn instance() -> impl Strategy<Value = WelchInstance> {
    (0..PRIMES.len(), 1u32..=3, any::<u64>()).prop_filter_map("g must be a unit", |(i, e, seed)| {
        let p = PRIMES[i];
        let pe = p.pow(e);
        let g = seed % pe;
        let ok = g % p != 0 && (p != 2 || g % 2 == 1);
        ok.then(|| WelchInstance::new(p, e, g).unwrap())
    })
}

fn odd_instance() -> impl Strategy<Value = WelchInstance> {
    instance().prop_filter("odd p", |w| w.p() != 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn orders_match_scan(w in instance()) {
        prop_assert_eq!(w.m(), scan_order(w.g_value() % w.p(), w.p()));
        prop_assert_eq!(w.ord_pe(), scan_order(w.g_value(), w.pe()));
    }

    #[test]
    fn f_is_periodic(w in instance(), x in -500i64..500, c in -500i64..500) {
        let f = w.f_value(x, c);
        prop_assert_eq!(f, w.f_value(x, c + w.c_period() as i64));
        prop_assert_eq!(f, w.f_value(x + w.x_period() as i64, c));
    }

    #[test]
    fn fixed_c_matches_scan(w in odd_instance(), c in 1i64..200) {
        let budget = ScanBudget::default();
        let period = w.x_period() as i64;
        let fast = w.fixed_c_residues(c).unwrap();
        let slow = scan_fixed_c(&w, c, (1, period), &budget).unwrap();
        prop_assert_eq!(fast.len() as u64, w.m());
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn p2_has_one_solution_per_period(e in 1u32..=10, g in any::<u64>(), c in -100i64..100) {
        let pe = 1u64 << e;
        let w = WelchInstance::new(2, e, (g % pe) | 1).unwrap();
        let xs = w.fixed_c_residues(c).unwrap();
        prop_assert_eq!(xs.len(), 1);
        prop_assert!(w.is_solution(xs[0], c));
        let report = w.solve_p2(c).unwrap();
        prop_assert_eq!(report.observed_count, 1);
    }

    #[test]
    fn c_count_matches_scan(w in odd_instance(), x in 1i64..400) {
        prop_assume!(x % w.p() as i64 != 0);
        let fast = w.count_c_for_fixed_x(x).unwrap();
        let slow = scan_c_for_fixed_x(&w, x, &ScanBudget::default()).unwrap();
        prop_assert_eq!(fast.count, slow.len() as u64);
    }

    #[test]
    fn pairs_are_solutions_and_fold_uniformly(w in odd_instance()) {
        prop_assume!(w.pe() * w.x_period() <= 200_000);
        let report = w.solve_all_pairs().unwrap();
        let Solutions::Pairs(pairs) = &report.solutions else {
            return Err(TestCaseError::fail("expected pairs"));
        };
        for s in pairs {
            prop_assert!(w.is_solution(s.x, s.c));
            prop_assert!(s.x >= 1 && s.x as u64 <= w.x_period());
            prop_assert!(s.c >= 1 && s.c as u64 <= w.c_period());
        }
        report.verify().unwrap();
    }

    #[test]
    fn unique_c_for_primitive_roots(w in odd_instance(), x in 1i64..300) {
        prop_assume!(w.is_primitive_root() && x % w.p() as i64 != 0);
        let c = w.unique_c_for_x(x).unwrap();
        prop_assert!(c >= 1 && c as u64 <= w.phi());
        prop_assert!(w.is_solution(x, c));
        let pair = w.inverse_pair(welch_core::SolutionPair::new(x, c)).unwrap();
        prop_assert!(w.inverse().unwrap().is_solution(pair.x, pair.c));
    }

    #[test]
    fn hensel_roots_solve(w in odd_instance(), c in 1i64..100) {
        let (m, pe) = (w.m() as i64, w.pe() as i64);
        for x0 in 0..m {
            let r = welch_core::hensel::lift_welch_fixed_c(&w, x0 as u64, c).unwrap().root.to_u64().unwrap() as i64;
            // x = r (mod p^e) with x - 1 + c = x0 (mod m)
            let x = (0..m).map(|k| r + k * pe).find(|x| (x - 1 + c - x0).rem_euclid(m) == 0).unwrap();
            prop_assert!(w.is_solution(x, c), "x0 = {}, x = {}", x0, x);
        }
    }
}
