use prophet_core::model::generators::{random_sparse, tower2};
use prophet_core::model::FeatureSpec;
use prophet_core::multi_item::{
    clamp_epsilon, col_sparse_multi, compute_bucket_config, merge_takes, row_sparse_multi, run_bucket_algorithm, run_bucket_on,
    small_r_col_sparse, BucketConfig, ColSparseMulti, DiscardReason,
};
use prophet_core::oracle::{Estimate, OracleConfig};
use prophet_core::policy::play_recorded;
use prophet_core::single_item::row_sparse_policy;
use prophet_core::stream::{AugmentedStream, ZeroBonus};
use prophet_core::{rng, DiscreteDistribution, Error, LinearInstance};

fn uniform(k: usize) -> DiscreteDistribution {
    DiscreteDistribution::new((1..=k).map(|v| (v as f64 / k as f64, 1.0 / k as f64)).collect()).unwrap()
}

#[test]
fn smallest_threshold_bound() {
    let cfg = OracleConfig::default();
    for r in [4usize, 64, 1024] {
        let (eps, clamped) = clamp_epsilon(0.1, r);
        assert!(clamped);
        let z = vec![uniform(4); r.min(64)];
        let b = compute_bucket_config(&z, r, eps, 2000, 3, &cfg).unwrap();
        assert!(b.tau[b.c] <= eps * b.expected_opt.mean / r as f64, "r = {r}");
        for j in 1..=b.c {
            assert!((b.tau[j] - (1.0 - eps) * b.tau[j - 1]).abs() <= 1e-12 * b.tau[0]);
        }
    }
}

#[test]
fn epsilon_range_is_checked() {
    let z = vec![uniform(2); 3];
    for eps in [0.0, 0.51, -1.0, f64::NAN] {
        assert!(matches!(compute_bucket_config(&z, 2, eps, 10, 0, &OracleConfig::default()), Err(Error::EpsilonOutOfRange { .. })));
    }
}

#[test]
fn values_below_floor_are_never_taken() {
    let b = BucketConfig::from_parts(3, 0.4, Estimate::exact(100.0, 1), |t| vec![Estimate::exact(1.0, 1); t.len()]).unwrap();
    let floor = b.tau[b.c];
    let t = run_bucket_on(&b, &[floor * 0.99, floor * 0.5, 0.0], 1);
    assert!(t.taken.is_empty());
    assert!(t.discards.iter().all(|d| d.reason == DiscardReason::BelowFloor));
}

#[test]
fn heavy_arrival_taken_unless_thinned() {
    let b = BucketConfig::from_parts(3, 0.4, Estimate::exact(1.0, 1), |t| vec![Estimate::exact(1.0, 1); t.len()]).unwrap();
    let mut thinned = 0;
    for seed in 0..2000 {
        let t = run_bucket_on(&b, &[1e6], seed);
        match t.taken.first() {
            Some(take) => assert_eq!(take.bucket, 0),
            None => thinned += 1,
        }
        assert_eq!(t.fills[0], 1);
    }
    // thinning probability 0.4, sd ≈ 11
    assert!((thinned as f64 - 800.0).abs() < 4.0 * 22.0, "{thinned}");
}

#[test]
fn stream_runs_are_reproducible() {
    let cfg = OracleConfig::default();
    let z = vec![uniform(5); 20];
    let b = compute_bucket_config(&z, 5, 0.3, 5000, 2, &cfg).unwrap();
    let s = AugmentedStream::new(z, Box::new(ZeroBonus));
    let a = run_bucket_algorithm(&b, &s, 7, 3).unwrap();
    assert_eq!(a, run_bucket_algorithm(&b, &s, 7, 3).unwrap());
    assert_ne!(a.1, run_bucket_algorithm(&b, &s, 7, 4).unwrap().1);
}

#[test]
fn group_reduction_at_unit_sparsity_is_the_bucket_algorithm() {
    let cfg = OracleConfig::default();
    let z: Vec<DiscreteDistribution> = (0..8).map(|k| DiscreteDistribution::two_point(1.0 + k as f64, 0.5).unwrap()).collect();
    let inst = LinearInstance::independent(z.clone());
    let multi = col_sparse_multi(&inst, 4, 1.0, 0.25, 2000, 11, &cfg).unwrap();
    let plain = compute_bucket_config(&z, 4, 0.25, 2000, rng::derive(rng::derive(11, rng::tag::ORACLE), 0), &cfg).unwrap();
    assert_eq!(multi.configs, vec![Some(plain.clone())]);
    let mut y = vec![0.0; 8];
    for k in 0..200 {
        inst.draw_y(5, k, &mut y);
        let run = multi.run(&y, k);
        assert_eq!(run[0], run_bucket_on(&plain, &y, ColSparseMulti::group_seed(k, 0)));
    }
}

#[test]
fn group_reduction_respects_budget() {
    let cfg = OracleConfig::default();
    let inst = random_sparse(30, 30, 2, 2, &FeatureSpec::default(), 4).unwrap();
    let multi = col_sparse_multi(&inst, 12, 0.5, 0.3, 2000, 1, &cfg).unwrap();
    let p = &multi.partition;
    assert_eq!(p.groups, (inst.col_sparsity() as f64 / 0.5).ceil() as usize);
    let mut y = vec![0.0; inst.m()];
    let mut x = vec![0.0; inst.n()];
    for k in 0..300 {
        inst.draw_y(9, k, &mut y);
        inst.apply(&y, &mut x);
        let parts = multi.run(&x, k);
        for (g, t) in parts.iter().enumerate() {
            assert!(t.taken.len() <= p.budget);
            assert!(t.taken.iter().all(|tk| p.assignment[tk.index] == g));
            if let Some(c) = &multi.configs[g] {
                t.check(c).unwrap();
            }
        }
        assert!(merge_takes(&parts).len() <= 12);
    }
    assert!(matches!(col_sparse_multi(&inst, 1, 0.5, 0.3, 100, 1, &cfg), Err(Error::BudgetUnderflow { .. })));
}

#[test]
fn row_sparse_single_bucket_identity() {
    let t = tower2(5, 0.1).unwrap();
    let mut y = vec![0.0; t.m()];
    let mut x = vec![0.0; t.n()];
    for seed in 0..50u64 {
        let multi = row_sparse_multi(&t, 1, seed).unwrap();
        let single = row_sparse_policy(&t, rng::derive(seed, 0)).unwrap();
        t.draw_y(seed, 0, &mut y);
        t.apply(&y, &mut x);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        play_recorded(&multi, &x, 1, 0, &mut a);
        play_recorded(&single, &x, 1, 0, &mut b);
        assert_eq!(a, b);
    }
}

#[test]
fn row_sparse_buckets_are_uniform() {
    let (n, r, seeds) = (12usize, 4usize, 10_000u64);
    let inst = LinearInstance::independent(vec![uniform(2); n]);
    let mut counts = vec![0u64; r];
    for seed in 0..seeds {
        for &b in &row_sparse_multi(&inst, r, seed).unwrap().assignment {
            counts[b] += 1;
        }
    }
    let total = (n as u64 * seeds) as f64;
    let p = 1.0 / r as f64;
    let sd = (total * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - total * p).abs() <= 4.0 * sd, "{c}");
    }
}

#[test]
fn small_r_discard_pile() {
    let cfg = OracleConfig { mc_samples: 100, ..OracleConfig::default() };
    // four arrivals all sharing one feature: s_col = 4
    let inst = LinearInstance::new(4, 1, (0..4).map(|i| (i, 0, 1.0)).collect(), vec![uniform(2)]).unwrap();
    assert_eq!(inst.col_sparsity(), 4);
    let mut discarded = 0u64;
    let trials = 10_000u64;
    for seed in 0..trials / 4 {
        let s = small_r_col_sparse(&inst, 2, seed, &cfg).unwrap();
        assert_eq!(s.c, 4);
        discarded += s.assignment.iter().filter(|a| a.is_none()).count() as u64;
    }
    let sd = (trials as f64 * 0.25).sqrt();
    assert!((discarded as f64 - trials as f64 * 0.5).abs() <= 4.0 * sd, "{discarded}");
    // r >= s_col: no discard pile
    for seed in 0..200 {
        assert!(small_r_col_sparse(&inst, 4, seed, &cfg).unwrap().assignment.iter().all(Option::is_some));
    }
}
