use proptest::prelude::*;

use prophet_core::model::generators::random_sparse;
use prophet_core::model::{FeatureLaw, FeatureSpec};
use prophet_core::multi_item::{compute_bucket_config, run_bucket_on};
use prophet_core::oracle::{
    best_fixed_threshold, brute_force_online_optimum, exact_online_optimum, exact_policy_value, exact_prophet_value, mc_value, threshold_curve, OracleConfig,
};
use prophet_core::single_item::{col_sparse_policy, row_sparse_policy};
use prophet_core::{DiscreteDistribution, LinearInstance, ThresholdPolicy};

fn small_instance() -> impl Strategy<Value = LinearInstance> {
    (2usize..=5, 1usize..=3, 1usize..=3, any::<u64>()).prop_filter_map("infeasible sparsity", |(n, s_row, s_col, seed)| {
        let m = (n * s_row / s_col).clamp(1, 6);
        let spec = FeatureSpec { features: FeatureLaw::Atoms { k: 2, v_max: 4.0 }, ..FeatureSpec::default() };
        random_sparse(n, m, s_row, s_col, &spec, seed).ok()
    })
}

fn config() -> OracleConfig {
    OracleConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalization_keeps_values(inst in small_instance(), tau in 0.0f64..6.0) {
        let cfg = config();
        let norm = inst.normalize_columns().unwrap();
        prop_assert!(norm.is_column_normalized());
        for r in 1..=inst.n() {
            let a = exact_prophet_value(&inst, r, &cfg).unwrap().mean;
            let b = exact_prophet_value(&norm, r, &cfg).unwrap().mean;
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
        let p = ThresholdPolicy::new(tau);
        let a = exact_policy_value(&inst, &p, 1, &cfg).unwrap().mean;
        let b = exact_policy_value(&norm, &p, 1, &cfg).unwrap().mean;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn oracle_ordering(inst in small_instance()) {
        let cfg = config();
        let prophet = exact_prophet_value(&inst, 1, &cfg).unwrap().mean;
        let online = exact_online_optimum(&inst, 1, &cfg).unwrap().mean;
        let (_, fixed) = best_fixed_threshold(&inst, &cfg).unwrap();
        prop_assert!(online <= prophet + 1e-9);
        prop_assert!(fixed.mean <= online + 1e-9);
        if let Ok(brute) = brute_force_online_optimum(&inst, &cfg) {
            prop_assert!((brute.mean - online).abs() <= 1e-9 * online.max(1.0), "{} vs {online}", brute.mean);
        }
    }

    #[test]
    fn multi_budget_dp_below_prophet(inst in small_instance(), r in 1usize..=3) {
        let cfg = config();
        let prophet = exact_prophet_value(&inst, r, &cfg).unwrap().mean;
        let online = exact_online_optimum(&inst, r, &cfg).unwrap().mean;
        prop_assert!(online <= prophet + 1e-9);
        if r > 1 {
            prop_assert!(online + 1e-9 >= exact_online_optimum(&inst, r - 1, &cfg).unwrap().mean);
        }
    }

    #[test]
    fn curve_matches_direct_evaluation(inst in small_instance()) {
        let cfg = config();
        let curve = threshold_curve(&inst, &cfg).unwrap();
        for (&t, &v) in curve.candidates.iter().zip(&curve.values).take(6) {
            let direct = exact_policy_value(&inst, &ThresholdPolicy::new(t), 1, &cfg).unwrap().mean;
            prop_assert!((direct - v).abs() <= 1e-9 * v.max(1.0));
        }
    }

    #[test]
    fn monte_carlo_is_deterministic(inst in small_instance(), seed in any::<u64>()) {
        let p = ThresholdPolicy::new(1.0);
        prop_assert_eq!(mc_value(&inst, &p, 1, 500, seed), mc_value(&inst, &p, 1, 500, seed));
    }

    #[test]
    fn constructions_are_deterministic(inst in small_instance(), seed in any::<u64>()) {
        let cfg = config();
        prop_assert_eq!(col_sparse_policy(&inst, seed, &cfg).unwrap(), col_sparse_policy(&inst, seed, &cfg).unwrap());
        prop_assert_eq!(row_sparse_policy(&inst, seed).unwrap(), row_sparse_policy(&inst, seed).unwrap());
    }

    #[test]
    fn transcripts_respect_invariants(
        values in prop::collection::vec(0.0f64..10.0, 2..6),
        xs in prop::collection::vec(0.0f64..40.0, 1..60),
        r in 1usize..8,
        eps in 0.05f64..0.5,
        seed in any::<u64>(),
    ) {
        let z: Vec<DiscreteDistribution> = values.iter().map(|&v| DiscreteDistribution::two_point(v.max(0.01), 0.3).unwrap()).collect();
        let z: Vec<DiscreteDistribution> = (0..xs.len()).map(|i| z[i % z.len()].clone()).collect();
        let cfg = compute_bucket_config(&z, r, eps, 2000, seed, &config()).unwrap();
        let t = run_bucket_on(&cfg, &xs, seed);
        prop_assert!(t.check(&cfg).is_ok(), "{:?}", t.check(&cfg));
        prop_assert_eq!(t.clone(), run_bucket_on(&cfg, &xs, seed));
        prop_assert_eq!(t.taken.len() + t.discards.len(), xs.len());
    }
}
