use std::path::Path;
use std::process::{Command, Output};

fn prophet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prophet")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn gen_tower(dir: &Path) -> String {
    let path = dir.join("t2.json");
    let p = path.to_str().unwrap().to_string();
    let out = prophet(&["gen", "tower2", "--n", "2", "--eps", "0.1", "--out", &p]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn run_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_tower(dir.path());
    let report = dir.path().join("r.json");
    let out = prophet(&["run", "--instance", &inst, "--algo", "fixed", "--tau", "5", "--oracle", "exact", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert!((v["alg"]["mean"].as_f64().unwrap() - 1.1).abs() < 1e-12);

    let csv = prophet(&["run", "--instance", &inst, "--algo", "half-max", "--samples", "1000", "--format", "csv"]);
    assert_eq!(code(&csv), 0);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("algorithm,") && !text.contains('\r'));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_tower(dir.path());
    let args = ["run", "--instance", &inst, "--algo", "row-sparse", "--oracle", "mc", "--samples", "3000", "--seed", "11"];
    assert_eq!(prophet(&args).stdout, prophet(&args).stdout);
}

#[test]
fn scan_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_tower(dir.path());
    let out = prophet(&["scan", "--instance", &inst]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 6);
    let out = prophet(&["oracle", "--instance", &inst, "--brute-force"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["online_optimum"]["mean"], v["brute_force_online"]["mean"]);
}

#[test]
fn repro_passes_with_zero() {
    let out = prophet(&["repro", "tower-hardness", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,check,measured,relation,bound,tolerance,margin,verdict,note\n"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&prophet(&["repro", "no-such-suite"])), 2);
    assert_eq!(code(&prophet(&["frobnicate"])), 2);
    assert_eq!(code(&prophet(&["run", "--instance", "/nonexistent.json"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_tower(dir.path());
    let out = prophet(&["run", "--instance", &inst, "--algo", "no-such-rule"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("half-max"));
}
