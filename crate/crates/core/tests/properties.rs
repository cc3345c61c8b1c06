mod common;

use common::*;
use hardcore_core::model::{interiors_overlap, Configuration, Grain, Window};
use hardcore_core::thinning::is_hard_core;
use hardcore_core::weights::log_sum_exp;
use hardcore_core::{solve_exact, WeightSpec};
use proptest::prelude::*;

fn balls(n: usize, side: f64) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-side / 2.0..side / 2.0, -side / 2.0..side / 2.0, 0.2..1.0f64), 0..n)
}

fn config(side: f64, b: &[(f64, f64, f64)]) -> Configuration {
    let v: Vec<_> = b.iter().map(|&(x, y, r)| ([x, y, 0.0], r)).collect();
    Configuration::from_balls(Window::torus(2, side).unwrap(), &v).unwrap()
}

proptest! {
    #[test]
    fn overlap_is_symmetric_and_translation_invariant(
        a in (-5.0..5.0f64, -5.0..5.0f64, 0.1..1.5f64),
        b in (-5.0..5.0f64, -5.0..5.0f64, 0.1..1.5f64),
        shift in (-20.0..20.0f64, -20.0..20.0f64),
    ) {
        let w = Window::torus(2, 10.0).unwrap();
        let ga = Grain::new(0, [a.0, a.1, 0.0], a.2);
        let gb = Grain::new(1, [b.0, b.1, 0.0], b.2);
        prop_assert_eq!(interiors_overlap(&ga, &gb, &w), interiors_overlap(&gb, &ga, &w));
        let sa = Grain::new(0, w.wrap(&[a.0 + shift.0, a.1 + shift.1, 0.0]), a.2);
        let sb = Grain::new(1, w.wrap(&[b.0 + shift.0, b.1 + shift.1, 0.0]), b.2);
        let d0 = w.distance(&ga.center, &gb.center);
        let d1 = w.distance(&sa.center, &sb.center);
        prop_assert!((d0 - d1).abs() < 1e-9);
    }

    #[test]
    fn weights_increase_with_radius(r in 0.01..5.0f64, dr in 0.001..1.0f64, a in 1.0..50.0f64) {
        for d in 1..=3 {
            for h in [WeightSpec::Volume, WeightSpec::ExpRadius(a)] {
                let small = Grain::new(0, [0.0; 3], r);
                let big = Grain::new(1, [0.0; 3], r + dr);
                prop_assert!(h.log_weight(&small, d) < h.log_weight(&big, d));
            }
        }
    }

    #[test]
    fn log_sum_exp_matches_direct_sum(v in prop::collection::vec(-30.0..30.0f64, 1..20)) {
        let direct = v.iter().map(|x| x.exp()).sum::<f64>().ln();
        let mut w = v.clone();
        prop_assert!((log_sum_exp(&mut w) - direct).abs() < 1e-9);
    }

    #[test]
    fn hard_core_scan_agrees_with_pairs(b in balls(40, 8.0)) {
        let c = config(8.0, &b);
        let all: Vec<usize> = (0..c.len()).collect();
        prop_assert_eq!(is_hard_core(&c, &all), pairwise_hard_core(&c, &all));
    }

    #[test]
    fn exact_solution_is_optimal_and_hard_core(b in balls(12, 6.0)) {
        let c = config(6.0, &b);
        let all: Vec<usize> = (0..c.len()).collect();
        let got = solve_exact(&all, &c, WeightSpec::Volume, 64).unwrap();
        prop_assert!(pairwise_hard_core(&c, &got.chosen));
        let (best, _) = exhaustive_mwis(&c, &all, |i| volume(&c, i));
        prop_assert!((got.total_weight - best).abs() < 1e-9);
    }
}
