//! Property-based invariants: projection geometry, timeline coverage,
//! Lambert-W inversion, and descent monotonicity on random instances. Case
//! counts are kept modest because each descent case solves a full instance.

use proptest::prelude::*;

use meco_core::bcd::{solve_bcd, BcdOptions};
use meco_core::harness::{generate_scenario, ScenarioConfig};
use meco_core::lambert::lambert_w0;
use meco_core::oracle::{project_capped_sum_box, project_epoch_simplex};
use meco_core::timeline::{build_timeline, validate_tasks};

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn simplex_projection_is_feasible_idempotent_and_closest(
        v in prop::collection::vec(-5.0_f64..5.0, 1..8),
        cap in 0.0_f64..5.0,
        shrink in 0.0_f64..1.0,
    ) {
        let p = project_epoch_simplex(&v, cap);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!(p.iter().sum::<f64>() <= cap * (1.0 + 1e-12) + 1e-12);

        let pp = project_epoch_simplex(&p, cap);
        prop_assert!(dist2(&p, &pp) <= 1e-20);

        // No feasible competitor is closer: compare against a scaled
        // nonnegative point that satisfies the cap.
        let mut y: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        let s: f64 = y.iter().sum();
        if s > 0.0 {
            let scale = shrink * cap / s;
            for x in &mut y {
                *x *= scale;
            }
        }
        prop_assert!(dist2(&p, &v) <= dist2(&y, &v) + 1e-9);
    }

    #[test]
    fn capped_box_projection_is_feasible_and_idempotent(
        v in prop::collection::vec(-5.0_f64..5.0, 1..8),
        lo in 0.0_f64..3.0,
        extra in 0.0_f64..3.0,
    ) {
        let hi = lo + extra;
        let p = project_capped_sum_box(&v, lo, hi);
        let sum: f64 = p.iter().sum();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!(sum >= lo - 1e-9 && sum <= hi + 1e-9);

        let pp = project_capped_sum_box(&p, lo, hi);
        prop_assert!(dist2(&p, &pp) <= 1e-18);
    }

    #[test]
    fn lambert_w0_inverts_w_exp_w(x in -0.36_f64..50.0) {
        let w = lambert_w0(x).unwrap();
        let back = w * w.exp();
        prop_assert!((back - x).abs() <= 1e-8 * x.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn timeline_epochs_tile_each_window(seed in any::<u64>(), mobiles in 1_usize..7) {
        let cfg = ScenarioConfig { mobiles, seed, ..Default::default() };
        let (tasks, _) = generate_scenario(&cfg);
        let timeline = build_timeline(&tasks).unwrap();

        prop_assert!(timeline.boundaries.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(timeline.epoch_lengths.iter().all(|&l| l >= 0.0));

        // Each mobile's epoch set is contiguous and tiles its window.
        for (k, task) in tasks.iter().enumerate() {
            let set = &timeline.epoch_sets[k];
            prop_assert!(!set.is_empty());
            prop_assert!(set.windows(2).all(|w| w[1] == w[0] + 1));
            let covered: f64 = set.iter().map(|&n| timeline.epoch_lengths[n]).sum();
            let window = task.latency();
            prop_assert!((covered - window).abs() <= 1e-9 * window.max(1.0));
            prop_assert!((timeline.boundaries[set[0]] - task.arrival).abs() <= 1e-12);
            prop_assert!(
                (timeline.boundaries[set[set.len() - 1] + 1] - task.deadline).abs() <= 1e-12
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bcd_descends_monotonically_within_constraints(seed in any::<u64>()) {
        let cfg = ScenarioConfig { mobiles: 3, seed, ..Default::default() };
        let (tasks, params) = generate_scenario(&cfg);
        let feasible = matches!(
            validate_tasks(&tasks, &params), Ok(rep) if rep.all_feasible()
        );
        prop_assume!(feasible);

        let timeline = build_timeline(&tasks).unwrap();
        let (_, report) = solve_bcd(&tasks, &params, &timeline, &BcdOptions::default()).unwrap();

        let slack = 1e-12 * report.objective_trace[0].max(1.0);
        prop_assert!(report.objective_trace.windows(2).all(|w| w[1] <= w[0] + slack));
        prop_assert!(report.residual_time_sharing <= 1e-9);
        prop_assert!(report.residual_data_bounds <= 1e-9);
    }
}
