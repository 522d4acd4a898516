//! Property tests for the invariants that span modules: selection sizes,
//! budget exactness, relaxation feasibility, and oracle consistency.

use gtp_core::cis::{cvx_select, greedy_remove, solve_relaxed_qp, CisMethod};
use gtp_core::experiment::{run_algorithm, Algorithm};
use gtp_core::guided::{guided_split, GuidedSplitConfig};
use gtp_core::oracle::{brute_cp, brute_gtp};
use gtp_core::types::{Assignment, CandidatePool, FeatureVector, TargetSet};
use proptest::prelude::*;

fn fv(values: Vec<f64>) -> FeatureVector {
    FeatureVector::new(values).unwrap()
}

fn instance_strategy(
    max_n: usize,
) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, usize)> {
    (2usize..=max_n, 1usize..=3).prop_flat_map(|(n, d)| {
        (
            proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, d), n),
            proptest::collection::vec(0.0f64..1.0, d),
            0..n,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selection_sizes_are_exact((rows, target, l) in instance_strategy(10)) {
        let points: Vec<FeatureVector> = rows.into_iter().map(fv).collect();
        let target = fv(target);
        let kept = cvx_select(&points, &target, l).unwrap();
        prop_assert_eq!(kept.len(), points.len() - l);
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        let removed = greedy_remove(&points, &target, l).unwrap();
        prop_assert_eq!(removed.len(), l);
        prop_assert!(removed.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn relaxed_solutions_are_feasible((rows, target, l) in instance_strategy(10)) {
        let points: Vec<FeatureVector> = rows.into_iter().map(fv).collect();
        let target = fv(target);
        let sol = solve_relaxed_qp(&points, &target, l, 1e-7, 5000).unwrap();
        let keep = (points.len() - l) as f64;
        prop_assert!(sol.x.iter().all(|&v| (-1e-8..=1.0 + 1e-8).contains(&v)));
        prop_assert!(sol.x.iter().sum::<f64>() >= keep - 1e-8);
        prop_assert!(sol.objective >= 0.0);
    }

    #[test]
    fn guided_split_budget_and_team_feasibility(
        (rows, _, _) in instance_strategy(12),
        k in 1usize..=3,
        budget_frac in 0.0f64..1.0,
        t_seed in 0u64..1000,
    ) {
        prop_assume!(rows.len() > k);
        let d = rows[0].len();
        let pool = CandidatePool::from_rows(rows).unwrap();
        let budget = ((pool.len() - k) as f64 * budget_frac) as usize;
        let mut s = t_seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let targets = TargetSet::new(
            (0..k).map(|_| fv((0..d).map(|_| next()).collect())).collect(),
        ).unwrap();
        let report = guided_split(&pool, &targets, budget, &GuidedSplitConfig::default()).unwrap();
        prop_assert_eq!(report.removed_ids.len(), budget);
        let sizes = report.partitioning.team_sizes();
        let nonempty_before = sizes.len();
        prop_assert_eq!(nonempty_before, k);
        // a team that had members keeps at least one
        let removed = report.partitioning.removed().len();
        prop_assert_eq!(removed, budget);
        let total: f64 = report.per_team_cost.iter().sum();
        prop_assert!((report.cost - total).abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn gtp_oracle_with_zero_budget_matches_cp(
        (rows, target, _) in instance_strategy(6),
    ) {
        prop_assume!(rows.len() >= 2);
        let d = rows[0].len();
        let pool = CandidatePool::from_rows(rows).unwrap();
        let targets = TargetSet::new(vec![fv(target), fv(vec![0.5; d])]).unwrap();
        let cp = brute_cp(&pool, &targets).unwrap();
        let gtp = brute_gtp(&pool, &targets, 0).unwrap();
        prop_assert_eq!(gtp.optimum.to_bits(), cp.unrestricted.optimum.to_bits());
    }
}

#[test]
fn every_baseline_covers_the_pool_once() {
    let synth = gtp_core::datagen::gen_synthetic(&gtp_core::datagen::SynthConfig {
        k: 3,
        m: 7,
        l: 3,
        d: 2,
        sigma: 0.15,
        seed: 9,
    })
    .unwrap();
    for algorithm in Algorithm::ALL {
        for l in [0, 3] {
            let report =
                run_algorithm(algorithm, &synth.pool, &synth.targets, l, 4, CisMethod::Greedy)
                    .unwrap();
            assert_eq!(report.partitioning.len(), synth.pool.len());
            assert_eq!(report.partitioning.removed().len(), l);
            let mut covered = 0;
            for i in 0..synth.pool.len() {
                match report.partitioning.slot(i) {
                    Assignment::Team(t) => assert!(t < 3),
                    Assignment::Removed => {}
                }
                covered += 1;
            }
            assert_eq!(covered, synth.pool.len());
        }
    }
}
