use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{DiscreteDistribution, LinearInstance};
use crate::oracle::{fold_scenarios, Estimate, Moments, OracleConfig};
use crate::par;
use crate::policy::{top_r_sum, Policy, Session};
use crate::rng;
use crate::stream::AugmentedStream;

/// `9·(ln r)^{3/2} / r^{1/4}`, the smallest `ε` covered by the formal
/// guarantee. Exceeds 1 for every desk-scale `r`.
pub fn epsilon_floor(r: usize) -> f64 {
    let lr = libm::log(r as f64);
    9.0 * libm::pow(lr, 1.5) / libm::pow(r as f64, 0.25)
}

/// `min(½, max(ε, floor(r)))` and whether the floor moved `ε`.
pub fn clamp_epsilon(eps: f64, r: usize) -> (f64, bool) {
    let floor = epsilon_floor(r);
    if eps >= floor {
        (eps.min(0.5), eps > 0.5)
    } else {
        (floor.min(0.5), true)
    }
}

/// Thresholds and capacities of the multi-item bucket algorithm.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BucketConfig {
    pub epsilon: f64,
    pub r: usize,
    pub c: usize,
    /// `τ_0..τ_c`, decreasing by a factor `1 - ε`.
    pub tau: Vec<f64>,
    /// `r̃_0 = 1`, `r̃_j = r_j + β`.
    pub capacity: Vec<f64>,
    pub beta: f64,
    /// `r_j` for `j = 0..=c` (index 0 counts top-`r` values at or above `τ_0`
    /// and is reported only).
    pub bucket_mass: Vec<Estimate>,
    pub expected_opt: Estimate,
}

impl BucketConfig {
    /// Bucket of value `x`: `min{j : x >= τ_j}`, or `None` below `τ_c`.
    /// A value on a shared boundary belongs to the higher bucket.
    pub fn bucket_of(&self, x: f64) -> Option<usize> {
        let j = self.tau.partition_point(|&t| t > x);
        (j <= self.c).then_some(j)
    }

    /// Most items bucket `j` may hold, `floor(r̃_j)`.
    pub fn slots(&self, j: usize) -> usize {
        libm::floor(self.capacity[j]) as usize
    }

    /// Thresholds and capacities from a known `E[OPT]` and bucket masses.
    pub fn from_parts(r: usize, epsilon: f64, expected_opt: Estimate, masses: impl FnOnce(&[f64]) -> Vec<Estimate>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::EpsilonOutOfRange { value: epsilon, range: "(0, 1/2]" });
        }
        if r == 0 {
            return Err(Error::InvalidArgument("cardinality budget r must be at least 1".into()));
        }
        let c = libm::ceil(libm::log(r as f64 / (epsilon * epsilon)) / epsilon) as usize;
        let beta = 3.0 * libm::sqrt(r as f64 * libm::log(c as f64 / epsilon));
        let tau: Vec<f64> = (0..=c).map(|j| libm::pow(1.0 - epsilon, j as f64) * expected_opt.mean / epsilon).collect();
        let bucket_mass = masses(&tau);
        let mut capacity = alloc::vec![1.0; c + 1];
        for j in 1..=c {
            capacity[j] = bucket_mass[j].mean + beta;
        }
        Ok(Self { epsilon, r, c, tau, capacity, beta, bucket_mass, expected_opt })
    }
}

fn bucket_index(tau: &[f64], x: f64) -> Option<usize> {
    let j = tau.partition_point(|&t| t > x);
    (j < tau.len()).then_some(j)
}

/// Indices of the `r` largest values, ties to the earlier index.
fn top_r_indices(z: &[f64], r: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..z.len()).collect();
    idx.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    idx.truncate(r);
    idx
}

fn count_buckets(tau: &[f64], z: &[f64], r: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for i in top_r_indices(z, r) {
        if let Some(j) = bucket_index(tau, z[i]) {
            out[j] += 1.0;
        }
    }
}

/// Estimates `E[OPT]` and `r_j` for independent `Z` and builds the config.
/// Exact when the joint support fits `cfg.enumeration_cap`, otherwise Monte
/// Carlo with `oracle_budget` draws.
pub fn compute_bucket_config(z: &[DiscreteDistribution], r: usize, epsilon: f64, oracle_budget: u64, seed: u64, cfg: &OracleConfig) -> Result<BucketConfig> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::EpsilonOutOfRange { value: epsilon, range: "(0, 1/2]" });
    }
    let instance = LinearInstance::independent(z.to_vec());
    let exact = instance.joint_support_size() <= cfg.enumeration_cap as u128;
    let draw_seed = rng::derive(seed, rng::tag::ORACLE);

    let opt = if exact {
        let (v, total) = fold_scenarios(&instance, cfg.enumeration_cap, || 0.0, |acc, _, x, p| *acc += p * top_r_sum(x, r), |a, b| a + b)?;
        Estimate::exact(v, total)
    } else {
        let [m] = crate::oracle::mc_moments(oracle_budget, |k| {
            let mut y = alloc::vec![0.0; z.len()];
            instance.draw_y(draw_seed, k, &mut y);
            [top_r_sum(&y, r)]
        });
        Estimate::from_moments(&m)
    };

    let mut failure = None;
    let config = BucketConfig::from_parts(r, epsilon, opt, |tau| {
        let k = tau.len();
        if exact {
            let result = fold_scenarios(
                &instance,
                cfg.enumeration_cap,
                || (alloc::vec![0.0; k], alloc::vec![0.0; k]),
                |acc: &mut (Vec<f64>, Vec<f64>), _, x, p| {
                    count_buckets(tau, x, r, &mut acc.1);
                    for (s, c) in acc.0.iter_mut().zip(&acc.1) {
                        *s += p * c;
                    }
                },
                |mut a, b| {
                    for (s, t) in a.0.iter_mut().zip(&b.0) {
                        *s += t;
                    }
                    a
                },
            );
            match result {
                Ok(((sums, _), total)) => sums.into_iter().map(|v| Estimate::exact(v, total)).collect(),
                Err(e) => {
                    failure = Some(e);
                    alloc::vec![Estimate::exact(0.0, 0); k]
                }
            }
        } else {
            let moments = par::map_reduce(
                oracle_budget,
                1024,
                |range| {
                    let mut acc = alloc::vec![Moments::default(); k];
                    let mut y = alloc::vec![0.0; z.len()];
                    let mut counts = alloc::vec![0.0; k];
                    for s in range {
                        instance.draw_y(draw_seed, s, &mut y);
                        count_buckets(tau, &y, r, &mut counts);
                        for (m, &c) in acc.iter_mut().zip(&counts) {
                            m.push(c);
                        }
                    }
                    acc
                },
                |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
            )
            .unwrap_or_else(|| alloc::vec![Moments::default(); k]);
            moments.iter().map(Estimate::from_moments).collect()
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(config),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DiscardReason {
    /// Below `τ_c`.
    BelowFloor,
    /// Every bucket from its own down to `c` was full.
    AllFull,
    /// Taken by the inner rule, dropped by the `ε` coin.
    Thinned,
    /// Taken by the inner rule after the budget `r` was used up.
    OverBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Take {
    pub index: usize,
    pub bucket: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Discard {
    pub index: usize,
    pub bucket: Option<usize>,
    pub reason: DiscardReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionTranscript {
    pub taken: Vec<Take>,
    /// Final `b_j` of the inner rule.
    pub fills: Vec<usize>,
    pub discards: Vec<Discard>,
}

impl SelectionTranscript {
    pub fn value(&self) -> f64 {
        self.taken.iter().map(|t| t.value).sum()
    }

    /// Checks the run against `config`: at most `r` takes, `b_j <= r̃_j`,
    /// and every take into bucket `j` has `x >= τ_j >= τ_c`.
    pub fn check(&self, config: &BucketConfig) -> core::result::Result<(), String> {
        if self.taken.len() > config.r {
            return Err(format!("{} takes exceed r = {}", self.taken.len(), config.r));
        }
        for (j, &b) in self.fills.iter().enumerate() {
            if b as f64 > config.capacity[j] {
                return Err(format!("bucket {j} holds {b} > {}", config.capacity[j]));
            }
        }
        for t in &self.taken {
            if t.value < config.tau[t.bucket] || t.value < config.tau[config.c] {
                return Err(format!("arrival {} with {} taken into bucket {} (τ = {})", t.index, t.value, t.bucket, config.tau[t.bucket]));
            }
        }
        Ok(())
    }
}

/// Outcome of one offer to [`BucketRun`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Take(usize),
    Drop(Option<usize>, DiscardReason),
}

/// Online state of the bucket algorithm: the inner rule with fills `b_j`,
/// wrapped by the `ε` thinning coin and the budget `r`.
#[derive(Debug, Clone)]
pub struct BucketRun<'a> {
    config: &'a BucketConfig,
    fills: Vec<usize>,
    kept: usize,
    coins: ChaCha8Rng,
}

impl<'a> BucketRun<'a> {
    pub fn new(config: &'a BucketConfig, seed: u64) -> Self {
        Self { config, fills: alloc::vec![0; config.c + 1], kept: 0, coins: rng::stream_rng(rng::derive(seed, rng::tag::BUCKET), 0) }
    }

    pub fn offer(&mut self, x: f64) -> Step {
        let cfg = self.config;
        let Some(mut j) = cfg.bucket_of(x) else {
            return Step::Drop(None, DiscardReason::BelowFloor);
        };
        while j <= cfg.c && self.fills[j] >= cfg.slots(j) {
            j += 1;
        }
        if j > cfg.c {
            return Step::Drop(None, DiscardReason::AllFull);
        }
        self.fills[j] += 1;
        if self.coins.random::<f64>() < cfg.epsilon {
            return Step::Drop(Some(j), DiscardReason::Thinned);
        }
        if self.kept == cfg.r {
            return Step::Drop(Some(j), DiscardReason::OverBudget);
        }
        self.kept += 1;
        Step::Take(j)
    }

    pub fn fills(&self) -> &[usize] {
        &self.fills
    }
}

/// Runs the bucket algorithm over a realized sequence `xs`.
pub fn run_bucket_on(config: &BucketConfig, xs: &[f64], seed: u64) -> SelectionTranscript {
    run_bucket_indexed(config, xs.iter().copied().enumerate(), seed)
}

/// Same as [`run_bucket_on`] for a subsequence tagged with arrival indices.
pub fn run_bucket_indexed(config: &BucketConfig, arrivals: impl IntoIterator<Item = (usize, f64)>, seed: u64) -> SelectionTranscript {
    let mut run = BucketRun::new(config, seed);
    let mut t = SelectionTranscript::default();
    for (index, value) in arrivals {
        match run.offer(value) {
            Step::Take(bucket) => t.taken.push(Take { index, bucket, value }),
            Step::Drop(bucket, reason) => t.discards.push(Discard { index, bucket, reason }),
        }
    }
    t.fills = run.fills;
    t
}

/// Realizes stream draw `index` (seed `derive(seed, DRAW)`) and runs the
/// bucket algorithm on it with coin seed `seed`. Also returns the realized
/// `Z` and `X`.
pub fn run_bucket_algorithm(config: &BucketConfig, stream: &AugmentedStream, seed: u64, index: u64) -> Result<(SelectionTranscript, Vec<f64>, Vec<f64>)> {
    let mut z = alloc::vec![0.0; stream.len()];
    let mut x = alloc::vec![0.0; stream.len()];
    stream.realize(rng::derive(seed, rng::tag::DRAW), index, &mut z, &mut x)?;
    let coin_seed = rng::derive(seed, index);
    Ok((run_bucket_on(config, &x, coin_seed), z, x))
}

/// Bucket algorithm as a [`Policy`]; the session seed drives the coins.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketPolicy {
    pub config: BucketConfig,
}

struct BucketSession<'a>(BucketRun<'a>);

impl Session for BucketSession<'_> {
    fn offer(&mut self, _index: usize, value: f64) -> bool {
        matches!(self.0.offer(value), Step::Take(_))
    }
}

impl Policy for BucketPolicy {
    fn start(&self, seed: u64) -> Box<dyn Session + '_> {
        Box::new(BucketSession(BucketRun::new(&self.config, seed)))
    }
}

/// Monte Carlo summary of many bucket runs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BucketReport {
    pub alg: Estimate,
    /// `E[sum of the r largest Z_i]`, same draws.
    pub benchmark: Estimate,
    pub trials: u64,
    /// First invariant failure, if any.
    pub violation: Option<String>,
}

/// Runs `trials` independent draws, checking every transcript.
pub fn simulate_bucket(config: &BucketConfig, stream: &AugmentedStream, trials: u64, seed: u64) -> Result<BucketReport> {
    type Acc = (Moments, Moments, Option<String>, Option<Error>);
    let out = par::map_reduce(
        trials,
        256,
        |range| -> Acc {
            let mut acc: Acc = (Moments::default(), Moments::default(), None, None);
            for k in range {
                match run_bucket_algorithm(config, stream, seed, k) {
                    Ok((t, z, _)) => {
                        if acc.2.is_none() {
                            if let Err(msg) = t.check(config) {
                                acc.2 = Some(format!("trial {k}: {msg}"));
                            }
                        }
                        acc.0.push(t.value());
                        acc.1.push(top_r_sum(&z, config.r));
                    }
                    Err(e) => {
                        acc.3.get_or_insert(e);
                    }
                }
            }
            acc
        },
        |a, b| (a.0.merge(b.0), a.1.merge(b.1), a.2.or(b.2), a.3.or(b.3)),
    );
    let (alg, bench, violation, err) = out.unwrap_or_default();
    if let Some(e) = err {
        return Err(e);
    }
    Ok(BucketReport { alg: Estimate::from_moments(&alg), benchmark: Estimate::from_moments(&bench), trials, violation })
}
