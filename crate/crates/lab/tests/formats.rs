use prophet_core::model::generators::{random_sparse, tower2};
use prophet_core::model::{FeatureLaw, FeatureSpec};
use prophet_lab::formats::{fmt_num, instance_from_json, instance_to_json, InstanceJson, Table};
use prophet_lab::{run_experiment, Algorithm, ExperimentReport, ExperimentSpec, GeneratorSpec, InstanceSource, OracleMode};

#[test]
fn instance_json_round_trip() {
    let spec = FeatureSpec { features: FeatureLaw::Atoms { k: 3, v_max: 4.0 }, ..FeatureSpec::default() };
    for inst in [tower2(4, 0.1).unwrap(), random_sparse(6, 5, 2, 3, &spec, 9).unwrap()] {
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(InstanceJson::from(&inst), InstanceJson::from(&back));
        assert_eq!(text, instance_to_json(&back));
    }
}

#[test]
fn instance_json_layout() {
    let inst = instance_from_json(r#"{"n": 2, "m": 1, "entries": [[0, 0, 1.0], [1, 0, 0.5]], "features": [[[0.0, 0.5], [2.0, 0.5]]]}"#).unwrap();
    assert_eq!((inst.n(), inst.m()), (2, 1));
    assert!(instance_from_json(r#"{"n": 1, "m": 1, "entries": [[0, 3, 1.0]], "features": [[[1.0, 1.0]]]}"#).is_err());
    assert!(instance_from_json(r#"{"n": 1, "m": 1, "entries": [], "features": [[[1.0, 0.4]]]}"#).is_err());
}

#[test]
fn numbers_survive_text() {
    for x in [0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, f64::MIN_POSITIVE, 2.0f64.sqrt()] {
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}

#[test]
fn csv_layout() {
    let mut t = Table::new(&["a", "b"]);
    t.push(vec!["1".into(), "x, \"quoted\"".into()]);
    let text = t.to_csv();
    assert!(text.ends_with('\n') && !text.contains('\r'));
    assert_eq!(Table::from_csv(&text).unwrap(), t);
}

#[test]
fn report_csv_round_trip() {
    for (algorithm, oracle) in [(Algorithm::HalfMax, OracleMode::Mc), (Algorithm::Fixed { tau: 5.0 }, OracleMode::Exact), (Algorithm::ColSparse, OracleMode::Auto)] {
        let spec = ExperimentSpec {
            instance: InstanceSource::Generator(GeneratorSpec::Tower2 { n: 3, eps: 0.1 }),
            algorithm,
            r: 1,
            num_samples: 5000,
            seed: 3,
            oracle,
        };
        let report = run_experiment(&spec).unwrap();
        let back = ExperimentReport::from_table(&Table::from_csv(&report.to_table().to_csv()).unwrap()).unwrap();
        assert_eq!(back.alg.mean.to_bits(), report.alg.mean.to_bits());
        assert_eq!(back.alg.std_error.to_bits(), report.alg.std_error.to_bits());
        assert_eq!(back.benchmark.mean.to_bits(), report.benchmark.mean.to_bits());
        assert_eq!(back.ratio.map(f64::to_bits), report.ratio.map(f64::to_bits));
        assert_eq!(back.ratio_error.map(f64::to_bits), report.ratio_error.map(f64::to_bits));
        assert_eq!(back, ExperimentReport { wall_time_ms: back.wall_time_ms, ..report });
    }
}
