use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use prophet_core::model::{CoefficientLaw, FeatureLaw, FeatureSpec};
use prophet_core::oracle::{best_fixed_threshold, brute_force_online_optimum, exact_online_optimum, exact_prophet_value, OracleConfig};
use prophet_lab::formats::{emit, instance_to_json, read_instance, Table};
use prophet_lab::{reproduce, run_experiment, scan_thresholds, Algorithm, ExperimentSpec, GeneratorSpec, InstanceSource, OracleMode, ScanPoints, SuiteOptions, SUITES};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "prophet", version, about = "Prophet inequalities for linearly correlated values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as JSON.
    Gen {
        #[command(subcommand)]
        generator: Gen,
    },
    /// Run one algorithm on one instance.
    Run {
        /// Experiment spec JSON; overrides the other flags.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, required_unless_present = "spec")]
        instance: Option<PathBuf>,
        #[arg(long, default_value = "half-max")]
        algo: String,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = OracleMode::Auto)]
        oracle: OracleMode,
        /// Bucket-algorithm epsilon (col-sparse-multi).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Group parameter eps' (col-sparse-multi).
        #[arg(long)]
        eps_prime: Option<f64>,
        /// Do not raise epsilon to the guarantee's lower bound.
        #[arg(long)]
        unclamped: bool,
        #[arg(long)]
        oracle_budget: Option<u64>,
    },
    /// Value of every fixed threshold (CSV).
    Scan {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated thresholds; default is the achievable set.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = OracleMode::Auto)]
        oracle: OracleMode,
    },
    /// Run a reproduction suite (or `all`) and report verdicts.
    Repro {
        suite: String,
        /// Override the Monte Carlo sample counts.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Exact oracle values for an instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Also run the brute-force online search.
        #[arg(long)]
        brute_force: bool,
    },
}

#[derive(Subcommand)]
enum Gen {
    Tower2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
    },
    TowerGeneral {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        eps: f64,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s_row: usize,
        #[arg(long)]
        s_col: usize,
        /// 0/1 coefficients instead of uniform (0, 1].
        #[arg(long)]
        ones: bool,
        /// Features with this many atoms on [0, 4] instead of rare large values.
        #[arg(long)]
        atoms: Option<usize>,
    },
    /// Any generator given as JSON, e.g. `{"generator": "tower2", "n": 4, "eps": 0.1}`.
    Spec { file: PathBuf },
}

enum Outcome {
    Pass,
    Fail,
}

fn render<T: Serialize>(value: &T, table: impl FnOnce() -> Table, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Csv => table().to_csv(),
    })
}

fn generate(g: Gen, seed: u64) -> Result<GeneratorSpec> {
    Ok(match g {
        Gen::Tower2 { n, eps } => GeneratorSpec::Tower2 { n, eps },
        Gen::TowerGeneral { c, eps } => GeneratorSpec::TowerGeneral { c, eps },
        Gen::Random { n, m, s_row, s_col, ones, atoms } => {
            let spec = FeatureSpec {
                coefficients: if ones { CoefficientLaw::Ones } else { CoefficientLaw::default() },
                features: atoms.map(|k| FeatureLaw::Atoms { k, v_max: 4.0 }).unwrap_or_default(),
            };
            GeneratorSpec::RandomSparse { n, m, s_row, s_col, spec, seed }
        }
        Gen::Spec { file } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            serde_json::from_str(&text).context("parsing generator JSON")?
        }
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn execute(cli: Cli) -> Result<Outcome> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gen { generator } => {
            let inst = generate(generator, cli.seed)?.build()?;
            emit(out, &instance_to_json(&inst))?;
        }
        Command::Run { spec, instance, algo, tau, r, samples, oracle, epsilon, eps_prime, unclamped, oracle_budget } => {
            let spec = match spec {
                Some(path) => read_json::<ExperimentSpec>(&path)?,
                None => {
                    let path = instance.expect("clap requires --instance without --spec");
                    let inst = read_instance(&path)?;
                    let mut algorithm = Algorithm::from_name(&algo, tau)?;
                    if let Algorithm::ColSparseMulti { eps_prime: ep, epsilon: e, unclamped: u, oracle_budget: b } = &mut algorithm {
                        *ep = eps_prime.or(*ep);
                        *e = epsilon.unwrap_or(*e);
                        *u = unclamped;
                        *b = oracle_budget.unwrap_or(*b);
                    } else if epsilon.is_some() || eps_prime.is_some() {
                        bail!("--epsilon and --eps-prime apply only to col-sparse-multi");
                    }
                    ExperimentSpec {
                        instance: InstanceSource::Inline((&inst).into()),
                        algorithm,
                        r,
                        num_samples: samples,
                        seed: cli.seed,
                        oracle,
                    }
                }
            };
            let report = run_experiment(&spec)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("wall time: {:.1} ms", report.wall_time_ms);
            emit(out, &render(&report, || report.to_table(), cli.format)?)?;
        }
        Command::Scan { instance, grid, samples, oracle } => {
            let inst = read_instance(&instance)?;
            let points = grid.map(ScanPoints::Grid).unwrap_or(ScanPoints::Achievable);
            let table = scan_thresholds(&inst, &points, oracle, samples, cli.seed)?;
            emit(out, &table.to_csv())?;
        }
        Command::Repro { suite, samples } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            if names.iter().any(|s| !SUITES.contains(s)) {
                bail!("unknown suite `{suite}`; known: all, {}", SUITES.join(", "));
            }
            let opts = SuiteOptions { seed: cli.seed, samples };
            let mut reports = Vec::new();
            for name in names {
                let rep = reproduce(name, &opts)?;
                eprintln!("{name}: {} ({} pass, {} fail, {} skip)", if rep.passed() { "PASS" } else { "FAIL" }, rep.count(prophet_lab::Verdict::Pass), rep.count(prophet_lab::Verdict::Fail), rep.count(prophet_lab::Verdict::Skip));
                reports.push(rep);
            }
            let ok = reports.iter().all(|r| r.passed());
            let table = || {
                let mut all = Table::default();
                for r in &reports {
                    let t = r.to_table();
                    all.header = t.header;
                    all.rows.extend(t.rows);
                }
                all
            };
            emit(out, &render(&reports, table, cli.format)?)?;
            return Ok(if ok { Outcome::Pass } else { Outcome::Fail });
        }
        Command::Oracle { instance, r, brute_force } => {
            let inst = read_instance(&instance)?;
            let cfg = OracleConfig { seed: cli.seed, ..OracleConfig::default() };
            let mut values = serde_json::Map::new();
            values.insert("prophet".into(), serde_json::to_value(exact_prophet_value(&inst, r, &cfg)?)?);
            values.insert("online_optimum".into(), serde_json::to_value(exact_online_optimum(&inst, r, &cfg)?)?);
            if r == 1 {
                let (tau, v) = best_fixed_threshold(&inst, &cfg)?;
                values.insert("best_fixed_tau".into(), tau.into());
                values.insert("best_fixed".into(), serde_json::to_value(v)?);
            }
            if brute_force {
                values.insert("brute_force_online".into(), serde_json::to_value(brute_force_online_optimum(&inst, &cfg)?)?);
            }
            let table = || {
                let mut t = Table::new(&["quantity", "value"]);
                for (k, v) in &values {
                    let cell = v.get("mean").unwrap_or(v).to_string();
                    t.push(vec![k.clone(), cell]);
                }
                t
            };
            emit(out, &render(&values, table, cli.format)?)?;
        }
    }
    Ok(Outcome::Pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
