//! Single experiments: one instance, one algorithm, one budget.

use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use prophet_core::model::generators::{random_sparse, tower2, tower_general, unweighted};
use prophet_core::model::FeatureSpec;
use prophet_core::multi_item::{clamp_epsilon, col_sparse_multi, default_eps_prime, row_sparse_multi, small_r_col_sparse, small_r_mixture};
use prophet_core::oracle::{
    best_fixed_threshold, exact_mixture_value, exact_online_optimum, exact_policy_value, exact_prophet_value, mc_prophet_value,
    mc_randomized_value, mc_value, Estimate, OracleConfig,
};
use prophet_core::single_item::{col_sparse_mixture, col_sparse_policy, row_sparse_mixture, row_sparse_policy, unweighted_policy};
use prophet_core::{rng, DiscreteDistribution, LinearInstance, Policy, ThresholdPolicy};
use serde::{Deserialize, Serialize};

use crate::formats::{fmt_num, InstanceJson, Table};

/// Largest number of construction outcomes enumerated for exact evaluation
/// of a randomized rule.
pub const MIXTURE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Tower2 { n: usize, eps: f64 },
    TowerGeneral { c: usize, eps: f64 },
    RandomSparse {
        n: usize,
        m: usize,
        s_row: usize,
        s_col: usize,
        #[serde(default)]
        spec: FeatureSpec,
        #[serde(default)]
        seed: u64,
    },
    Unweighted { m: usize, sets: Vec<Vec<usize>>, features: Vec<DiscreteDistribution> },
    Independent { features: Vec<DiscreteDistribution> },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<LinearInstance> {
        Ok(match self {
            Self::Tower2 { n, eps } => tower2(*n, *eps)?,
            Self::TowerGeneral { c, eps } => tower_general(*c, *eps)?,
            Self::RandomSparse { n, m, s_row, s_col, spec, seed } => random_sparse(*n, *m, *s_row, *s_col, spec, *seed)?,
            Self::Unweighted { m, sets, features } => unweighted(*m, sets, features.clone())?,
            Self::Independent { features } => LinearInstance::independent(features.clone()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    Inline(InstanceJson),
    Generator(GeneratorSpec),
}

impl InstanceSource {
    pub fn build(&self) -> Result<LinearInstance> {
        match self {
            Self::Inline(j) => Ok(LinearInstance::try_from(j.clone())?),
            Self::Generator(g) => g.build(),
        }
    }
}

fn default_eps() -> f64 {
    0.2
}

fn default_oracle_budget() -> u64 {
    20_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Algorithm {
    /// Take the first `X_i >= tau`.
    Fixed { tau: f64 },
    /// Fixed threshold `½·E[max_i X_i]`.
    HalfMax,
    /// Best fixed threshold (exact oracle only).
    BestFixed,
    ColSparse,
    RowSparse,
    Unweighted,
    ColSparseMulti {
        #[serde(default)]
        eps_prime: Option<f64>,
        #[serde(default = "default_eps")]
        epsilon: f64,
        /// Skip the lower clamp on `ε`.
        #[serde(default)]
        unclamped: bool,
        #[serde(default = "default_oracle_budget")]
        oracle_budget: u64,
    },
    RowSparseMulti,
    SmallRColSparse,
}

pub const ALGORITHMS: &[&str] =
    &["fixed", "half-max", "best-fixed", "col-sparse", "row-sparse", "unweighted", "col-sparse-multi", "row-sparse-multi", "small-r-col-sparse"];

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Fixed { .. } => "fixed",
            Self::HalfMax => "half-max",
            Self::BestFixed => "best-fixed",
            Self::ColSparse => "col-sparse",
            Self::RowSparse => "row-sparse",
            Self::Unweighted => "unweighted",
            Self::ColSparseMulti { .. } => "col-sparse-multi",
            Self::RowSparseMulti => "row-sparse-multi",
            Self::SmallRColSparse => "small-r-col-sparse",
        }
    }

    /// Parses a registered name; parameters take their defaults (`tau` for
    /// `fixed` is required).
    pub fn from_name(name: &str, tau: Option<f64>) -> Result<Self> {
        Ok(match name {
            "fixed" => Self::Fixed { tau: tau.ok_or_else(|| anyhow!("algorithm `fixed` needs --tau"))? },
            "half-max" => Self::HalfMax,
            "best-fixed" => Self::BestFixed,
            "col-sparse" => Self::ColSparse,
            "row-sparse" => Self::RowSparse,
            "unweighted" => Self::Unweighted,
            "col-sparse-multi" => {
                Self::ColSparseMulti { eps_prime: None, epsilon: default_eps(), unclamped: false, oracle_budget: default_oracle_budget() }
            }
            "row-sparse-multi" => Self::RowSparseMulti,
            "small-r-col-sparse" => Self::SmallRColSparse,
            other => bail!("unknown algorithm `{other}`; registered: {}", ALGORITHMS.join(", ")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    Exact,
    Mc,
    #[default]
    Auto,
}

fn default_r() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instance: InstanceSource,
    pub algorithm: Algorithm,
    #[serde(default = "default_r")]
    pub r: usize,
    pub num_samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oracle: OracleMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub n: usize,
    pub m: usize,
    pub s_row: usize,
    pub s_col: usize,
    pub r: usize,
    pub seed: u64,
    pub num_samples: u64,
    /// Oracle actually used for the benchmark: `exact` or `mc`.
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub algorithm: Algorithm,
    pub alg: Estimate,
    pub benchmark: Estimate,
    pub online_opt: Option<Estimate>,
    /// `benchmark / alg`; `None` when `alg` is not positive.
    pub ratio: Option<f64>,
    /// First-order error of the ratio, treating both means as independent.
    pub ratio_error: Option<f64>,
    pub metadata: Metadata,
    pub warnings: Vec<String>,
    /// Excluded from JSON so reports stay bit-identical across runs.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

/// `b / a` and its delta-method error.
pub fn ratio_with_error(benchmark: &Estimate, alg: &Estimate) -> (Option<f64>, Option<f64>) {
    if alg.mean <= 0.0 {
        return (None, None);
    }
    let q = benchmark.mean / alg.mean;
    let rb = if benchmark.mean != 0.0 { benchmark.std_error / benchmark.mean } else { 0.0 };
    let ra = alg.std_error / alg.mean;
    (Some(q), Some(q.abs() * (rb * rb + ra * ra).sqrt()))
}

fn split_samples(samples: u64) -> (u64, u64) {
    let outer = (samples as f64).sqrt().ceil().max(1.0) as u64;
    (outer, samples.div_ceil(outer))
}

struct Evaluator<'a> {
    inst: &'a LinearInstance,
    cfg: OracleConfig,
    exact: bool,
    mode: OracleMode,
    r: usize,
    samples: u64,
    seed: u64,
    warnings: Vec<String>,
}

impl Evaluator<'_> {
    fn deterministic(&self, p: &(impl Policy + ?Sized)) -> Result<Estimate> {
        if self.exact {
            Ok(exact_policy_value(self.inst, p, self.r, &self.cfg)?)
        } else {
            Ok(mc_value(self.inst, p, self.r, self.samples, self.seed))
        }
    }

    /// Exact over the construction outcomes when they fit, otherwise
    /// constructions times draws.
    fn randomized<P, M, B>(&mut self, mixture: M, build: B) -> Result<Estimate>
    where
        P: Policy,
        M: FnOnce() -> prophet_core::Result<Vec<(f64, P)>>,
        B: Fn(u64) -> prophet_core::Result<P> + Sync + Send,
    {
        if self.exact {
            match mixture() {
                Ok(mix) => {
                    let comps: Vec<(f64, &dyn Policy)> = mix.iter().map(|(w, p)| (*w, p as &dyn Policy)).collect();
                    return Ok(exact_mixture_value(self.inst, &comps, self.r, &self.cfg)?);
                }
                Err(e) if self.mode == OracleMode::Exact => return Err(e).context("exact evaluation of the randomized rule"),
                Err(_) => self.warnings.push("construction outcomes too many to enumerate; value is Monte Carlo".into()),
            }
        }
        let (outer, inner) = split_samples(self.samples);
        Ok(mc_randomized_value(self.inst, build, self.r, outer, inner, self.seed)?)
    }

    fn coin_randomized<P, B>(&mut self, build: B) -> Result<Estimate>
    where
        P: Policy,
        B: Fn(u64) -> prophet_core::Result<P> + Sync + Send,
    {
        if self.mode == OracleMode::Exact {
            bail!("this algorithm has internal randomness that the exact oracle does not enumerate; use --oracle mc or auto");
        }
        let (outer, inner) = split_samples(self.samples);
        Ok(mc_randomized_value(self.inst, build, self.r, outer, inner, self.seed)?)
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    if spec.num_samples == 0 {
        bail!("num_samples must be at least 1");
    }
    if spec.r == 0 {
        bail!("r must be at least 1");
    }
    let inst = spec.instance.build()?;
    let cfg = OracleConfig { mc_samples: spec.num_samples, seed: spec.seed, ..OracleConfig::default() };
    let support = inst.joint_support_size();
    let exact = match spec.oracle {
        OracleMode::Exact => true,
        OracleMode::Mc => false,
        OracleMode::Auto => support <= cfg.enumeration_cap as u128,
    };
    let mut cx = Evaluator { inst: &inst, cfg, exact, mode: spec.oracle, r: spec.r, samples: spec.num_samples, seed: spec.seed, warnings: Vec::new() };

    let benchmark = if exact { exact_prophet_value(&inst, spec.r, &cfg)? } else { mc_prophet_value(&inst, spec.r, spec.num_samples, spec.seed) };
    let online_opt = if exact && support <= cfg.dp_cap as u128 { Some(exact_online_optimum(&inst, spec.r, &cfg)?) } else { None };

    let r = spec.r;
    let alg = match &spec.algorithm {
        Algorithm::Fixed { tau } => cx.deterministic(&ThresholdPolicy::new(*tau))?,
        Algorithm::HalfMax => {
            let e = if exact {
                exact_prophet_value(&inst, 1, &cfg)?
            } else {
                mc_prophet_value(&inst, 1, spec.num_samples, rng::derive(spec.seed, rng::tag::ORACLE))
            };
            cx.deterministic(&ThresholdPolicy::new(0.5 * e.mean))?
        }
        Algorithm::BestFixed => {
            if !exact {
                bail!("best-fixed needs the exact oracle (joint support {support} > {})", cfg.enumeration_cap);
            }
            let (tau, _) = best_fixed_threshold(&inst, &cfg)?;
            cx.deterministic(&ThresholdPolicy::new(tau))?
        }
        Algorithm::Unweighted => {
            let (_, p) = unweighted_policy(&inst, &cfg)?;
            cx.deterministic(&p)?
        }
        Algorithm::ColSparse => cx.randomized(|| col_sparse_mixture(&inst, &cfg, MIXTURE_CAP), |s| col_sparse_policy(&inst, s, &cfg))?,
        Algorithm::RowSparse => cx.randomized(|| row_sparse_mixture(&inst, MIXTURE_CAP), |s| row_sparse_policy(&inst, s))?,
        Algorithm::SmallRColSparse => cx.randomized(|| small_r_mixture(&inst, r, &cfg, MIXTURE_CAP), |s| small_r_col_sparse(&inst, r, s, &cfg))?,
        Algorithm::RowSparseMulti => cx.coin_randomized(|s| row_sparse_multi(&inst, r, s))?,
        Algorithm::ColSparseMulti { eps_prime, epsilon, unclamped, oracle_budget } => {
            let eps_prime = eps_prime.unwrap_or_else(|| default_eps_prime(inst.col_sparsity(), r));
            let s_col = inst.col_sparsity().max(1);
            let group_budget = (eps_prime * r as f64 / s_col as f64).floor() as usize;
            let eps = if *unclamped {
                *epsilon
            } else {
                let (e, moved) = clamp_epsilon(*epsilon, group_budget.max(1));
                if moved {
                    cx.warnings.push(format!("epsilon {} clamped to {}", epsilon, e));
                }
                e
            };
            let budget = *oracle_budget;
            cx.coin_randomized(|s| col_sparse_multi(&inst, r, eps_prime, eps, budget, s, &cfg))?
        }
    };

    for (what, e) in [("ALG", Some(&alg)), ("benchmark", Some(&benchmark)), ("online optimum", online_opt.as_ref())] {
        if let Some(e) = e {
            if !e.exact && e.num_samples < 2 {
                cx.warnings.push(format!("{what} std_error is unreliable (n = {})", e.num_samples));
            }
        }
    }
    let (ratio, ratio_error) = ratio_with_error(&benchmark, &alg);
    let metadata = Metadata {
        n: inst.n(),
        m: inst.m(),
        s_row: inst.row_sparsity(),
        s_col: inst.col_sparsity(),
        r,
        seed: spec.seed,
        num_samples: spec.num_samples,
        oracle: if exact { "exact" } else { "mc" }.into(),
    };
    Ok(ExperimentReport {
        algorithm: spec.algorithm.clone(),
        alg,
        benchmark,
        online_opt,
        ratio,
        ratio_error,
        metadata,
        warnings: cx.warnings,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

const REPORT_COLUMNS: &[&str] = &[
    "algorithm", "n", "m", "s_row", "s_col", "r", "seed", "num_samples", "oracle", "alg_mean", "alg_std_error", "alg_n", "alg_exact",
    "benchmark_mean", "benchmark_std_error", "benchmark_n", "benchmark_exact", "online_mean", "online_std_error", "online_n", "online_exact",
    "ratio", "ratio_error", "warnings",
];

fn est_cells(e: Option<&Estimate>) -> [String; 4] {
    match e {
        Some(e) => [fmt_num(e.mean), fmt_num(e.std_error), e.num_samples.to_string(), e.exact.to_string()],
        None => Default::default(),
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

impl ExperimentReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(REPORT_COLUMNS);
        let md = &self.metadata;
        let mut row = vec![
            serde_json::to_string(&self.algorithm).expect("algorithm serializes"),
            md.n.to_string(),
            md.m.to_string(),
            md.s_row.to_string(),
            md.s_col.to_string(),
            md.r.to_string(),
            md.seed.to_string(),
            md.num_samples.to_string(),
            md.oracle.clone(),
        ];
        row.extend(est_cells(Some(&self.alg)));
        row.extend(est_cells(Some(&self.benchmark)));
        row.extend(est_cells(self.online_opt.as_ref()));
        row.push(opt_num(self.ratio));
        row.push(opt_num(self.ratio_error));
        row.push(self.warnings.join("; "));
        t.push(row);
        t
    }

    /// Inverse of [`to_table`](Self::to_table) (wall time is not stored).
    pub fn from_table(t: &Table) -> Result<Self> {
        let row = t.rows.first().ok_or_else(|| anyhow!("report CSV has no data row"))?;
        let get = |name: &str| -> Result<&str> {
            let k = t.column(name).ok_or_else(|| anyhow!("missing column {name}"))?;
            Ok(row[k].as_str())
        };
        let est = |prefix: &str| -> Result<Option<Estimate>> {
            let mean = get(&format!("{prefix}_mean"))?;
            if mean.is_empty() {
                return Ok(None);
            }
            Ok(Some(Estimate {
                mean: mean.parse()?,
                std_error: get(&format!("{prefix}_std_error"))?.parse()?,
                num_samples: get(&format!("{prefix}_n"))?.parse()?,
                exact: get(&format!("{prefix}_exact"))?.parse()?,
            }))
        };
        let opt = |name: &str| -> Result<Option<f64>> {
            let s = get(name)?;
            Ok(if s.is_empty() { None } else { Some(s.parse()?) })
        };
        let warnings = get("warnings")?;
        Ok(Self {
            algorithm: serde_json::from_str(get("algorithm")?)?,
            alg: est("alg")?.ok_or_else(|| anyhow!("missing ALG estimate"))?,
            benchmark: est("benchmark")?.ok_or_else(|| anyhow!("missing benchmark estimate"))?,
            online_opt: est("online")?,
            ratio: opt("ratio")?,
            ratio_error: opt("ratio_error")?,
            metadata: Metadata {
                n: get("n")?.parse()?,
                m: get("m")?.parse()?,
                s_row: get("s_row")?.parse()?,
                s_col: get("s_col")?.parse()?,
                r: get("r")?.parse()?,
                seed: get("seed")?.parse()?,
                num_samples: get("num_samples")?.parse()?,
                oracle: get("oracle")?.into(),
            },
            warnings: if warnings.is_empty() { Vec::new() } else { warnings.split("; ").map(String::from).collect() },
            wall_time_ms: 0.0,
        })
    }
}
