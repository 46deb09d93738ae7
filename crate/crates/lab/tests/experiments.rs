use prophet_core::{DiscreteDistribution, LinearInstance};
use prophet_lab::corpus::smoke_corpus;
use prophet_lab::experiment::ALGORITHMS;
use prophet_lab::{run_experiment, scan_thresholds, Algorithm, ExperimentSpec, GeneratorSpec, InstanceSource, OracleMode, ScanPoints};

fn spec(instance: InstanceSource, algorithm: Algorithm, oracle: OracleMode) -> ExperimentSpec {
    ExperimentSpec { instance, algorithm, r: 1, num_samples: 20_000, seed: 7, oracle }
}

fn two_tower() -> InstanceSource {
    InstanceSource::Generator(GeneratorSpec::Tower2 { n: 2, eps: 0.1 })
}

#[test]
fn fixed_rule_on_two_tower() {
    let rep = run_experiment(&spec(two_tower(), Algorithm::Fixed { tau: 5.0 }, OracleMode::Exact)).unwrap();
    assert!((rep.alg.mean - 1.1).abs() < 1e-12);
    assert!((rep.benchmark.mean - 1.99).abs() < 1e-12);
    assert!((rep.ratio.unwrap() - 1.99 / 1.1).abs() < 1e-12);
    assert_eq!(rep.ratio_error, Some(0.0));
    assert_eq!(rep.metadata.oracle, "exact");
    assert!((rep.online_opt.unwrap().mean - 1.18).abs() < 1e-12);
}

#[test]
fn half_max_within_two_on_independent_values() {
    let d = |pts: Vec<(f64, f64)>| DiscreteDistribution::new(pts).unwrap();
    let inst = LinearInstance::independent(vec![
        d(vec![(0.0, 0.5), (1.0, 0.5)]),
        d(vec![(0.0, 0.9), (10.0, 0.1)]),
        d(vec![(0.5, 0.7), (2.0, 0.3)]),
        d(vec![(0.0, 0.99), (100.0, 0.01)]),
    ]);
    let rep = run_experiment(&spec(InstanceSource::Inline((&inst).into()), Algorithm::HalfMax, OracleMode::Exact)).unwrap();
    assert!(rep.ratio.unwrap() <= 2.0 + 1e-9, "{:?}", rep.ratio);
}

#[test]
fn single_sample_is_flagged() {
    let mut s = spec(two_tower(), Algorithm::HalfMax, OracleMode::Mc);
    s.num_samples = 1;
    let rep = run_experiment(&s).unwrap();
    assert!(rep.warnings.iter().any(|w| w.contains("unreliable")), "{:?}", rep.warnings);
}

#[test]
fn bad_specs_are_errors() {
    assert!(Algorithm::from_name("no-such-rule", None).is_err());
    assert!(Algorithm::from_name("fixed", None).is_err());
    let big = InstanceSource::Generator(GeneratorSpec::Tower2 { n: 30, eps: 0.01 });
    assert!(run_experiment(&spec(big, Algorithm::HalfMax, OracleMode::Exact)).is_err());
    let text = r#"{"instance": {"generator": {"generator": "tower2", "n": 2, "eps": 0.1}}, "algorithm": {"name": "bogus"}, "num_samples": 10}"#;
    assert!(serde_json::from_str::<ExperimentSpec>(text).is_err());
}

#[test]
fn spec_json_defaults() {
    let text = r#"{"instance": {"generator": {"generator": "tower2", "n": 2, "eps": 0.1}}, "algorithm": {"name": "col-sparse-multi"}, "num_samples": 10}"#;
    let s: ExperimentSpec = serde_json::from_str(text).unwrap();
    assert_eq!(s.r, 1);
    assert_eq!(s.oracle, OracleMode::Auto);
    assert!(matches!(s.algorithm, Algorithm::ColSparseMulti { eps_prime: None, epsilon, unclamped: false, .. } if epsilon == 0.2));
}

#[test]
fn reports_are_bit_identical() {
    for algorithm in [Algorithm::HalfMax, Algorithm::RowSparse, Algorithm::RowSparseMulti] {
        let s = ExperimentSpec { r: 2, ..spec(InstanceSource::Generator(GeneratorSpec::Tower2 { n: 6, eps: 0.2 }), algorithm, OracleMode::Mc) };
        let a = serde_json::to_string(&run_experiment(&s).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&s).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn smoke_matrix() {
    for entry in smoke_corpus().unwrap() {
        for &name in ALGORITHMS {
            let algorithm = Algorithm::from_name(name, Some(1.0)).unwrap();
            let r = match name {
                // each group needs floor(eps' r / s_col) >= 1
                "col-sparse-multi" => 10 * entry.instance.col_sparsity(),
                "row-sparse-multi" | "small-r-col-sparse" => 2,
                _ => 1,
            };
            let s = ExperimentSpec { r, num_samples: 400, ..spec(InstanceSource::Inline((&entry.instance).into()), algorithm, OracleMode::Auto) };
            let result = run_experiment(&s);
            if name == "unweighted" && !entry.instance.is_unweighted() {
                assert!(result.is_err(), "unweighted rule accepted weighted {}", entry.name);
                continue;
            }
            let rep = result.unwrap_or_else(|e| panic!("{name} on {}: {e:#}", entry.name));
            assert!(rep.alg.mean.is_finite() && rep.alg.mean >= 0.0, "{name} on {}", entry.name);
            assert!(rep.alg.mean <= rep.benchmark.mean + 6.0 * (rep.alg.std_error + rep.benchmark.std_error) + 1e-9, "{name} on {}", entry.name);
        }
    }
}

fn scan_values(inst: &LinearInstance, points: ScanPoints) -> Vec<(f64, f64)> {
    let t = scan_thresholds(inst, &points, OracleMode::Exact, 1, 0).unwrap();
    t.rows.iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect()
}

#[test]
fn two_tower_plateaus() {
    let inst = two_tower().build().unwrap();
    let v = scan_values(&inst, ScanPoints::Grid(vec![5.0, 15.0, 50.0, 150.0]));
    let expect = [1.1, 0.92, 1.0, 0.0];
    for ((_, got), want) in v.iter().zip(expect) {
        assert!((got - want).abs() < 1e-12, "{v:?}");
    }
}

#[test]
fn deterministic_arrival_scan() {
    let inst = LinearInstance::independent(vec![DiscreteDistribution::new(vec![(3.0, 1.0)]).unwrap()]);
    let v = scan_values(&inst, ScanPoints::Grid(vec![0.0, 2.9, 3.0, 3.1, 1e9]));
    assert_eq!(v.iter().map(|p| p.1).collect::<Vec<_>>(), [3.0, 3.0, 3.0, 0.0, 0.0]);
    let all = scan_values(&inst, ScanPoints::Achievable);
    assert_eq!(all.last().unwrap().1, 0.0);
}

#[test]
fn mc_scan_needs_a_grid() {
    let inst = two_tower().build().unwrap();
    assert!(scan_thresholds(&inst, &ScanPoints::Achievable, OracleMode::Mc, 100, 1).is_err());
    let t = scan_thresholds(&inst, &ScanPoints::Grid(vec![5.0]), OracleMode::Mc, 200_000, 1).unwrap();
    let (v, se): (f64, f64) = (t.rows[0][1].parse().unwrap(), t.rows[0][2].parse().unwrap());
    assert!((v - 1.1).abs() <= 4.0 * se, "{v} ± {se}");
}
