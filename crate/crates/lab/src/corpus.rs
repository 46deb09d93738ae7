//! Fixed instance corpora shared by the suites and the smoke matrix.

use anyhow::{anyhow, Result};
use prophet_core::model::generators::{random_sparse, tower2, tower_general, unweighted};
use prophet_core::model::{FeatureLaw, FeatureSpec};
use prophet_core::{DiscreteDistribution, LinearInstance};

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub instance: LinearInstance,
}

fn entry(name: impl Into<String>, instance: LinearInstance) -> CorpusEntry {
    CorpusEntry { name: name.into(), instance }
}

/// First seed from `base` whose instance realizes column sparsity `s_col`.
fn with_exact_col_sparsity(n: usize, m: usize, s_row: usize, s_col: usize, spec: &FeatureSpec, base: u64) -> Result<(u64, LinearInstance)> {
    for seed in base..base + 500 {
        if let Ok(inst) = random_sparse(n, m, s_row, s_col, spec, seed) {
            if inst.col_sparsity() == s_col {
                return Ok((seed, inst));
            }
        }
    }
    Err(anyhow!("no seed in {base}..{} realizes s_col = {s_col}", base + 500))
}

fn spec(k: usize) -> FeatureSpec {
    let features = if k % 2 == 0 { FeatureLaw::default() } else { FeatureLaw::Atoms { k: 2, v_max: 4.0 } };
    FeatureSpec { features, ..FeatureSpec::default() }
}

/// Twenty random instances, four for each `s_col` in `1..=5`, small enough
/// for the exact oracle and for enumerating every construction outcome.
pub fn random_corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for s_col in 1..=5usize {
        for k in 0..4usize {
            let n = 6;
            let s_row = 1 + k % 3;
            let m = (n * s_row / s_col).clamp(2, 8);
            let (seed, inst) = with_exact_col_sparsity(n, m, s_row, s_col, &spec(k), 1000 * s_col as u64 + 37 * k as u64)?;
            out.push(entry(format!("random-c{s_col}-{k}-seed{seed}"), inst));
        }
    }
    Ok(out)
}

/// Instances with `s_col` in `{2, 4}` for the small-budget rule, tagged with
/// the budget `r` each is run at.
pub fn small_r_corpus() -> Result<Vec<(CorpusEntry, usize)>> {
    let mut out = Vec::new();
    for (s_col, r) in [(2usize, 1usize), (4, 2), (4, 4)] {
        for k in 0..2usize {
            let (seed, inst) = with_exact_col_sparsity(5, 5, 2 + k, s_col, &spec(k), 7000 + 100 * s_col as u64 + 10 * r as u64 + k as u64)?;
            out.push((entry(format!("small-r-c{s_col}-r{r}-{k}-seed{seed}"), inst), r));
        }
    }
    Ok(out)
}

fn tower_features(levels: usize, eps: f64) -> Result<Vec<DiscreteDistribution>> {
    (1..=levels).map(|i| DiscreteDistribution::tower(i as i32, eps).map_err(Into::into)).collect()
}

/// Ten 0/1 instances, including tower-like nested sets.
pub fn unweighted_corpus() -> Result<Vec<CorpusEntry>> {
    let b = |p: f64| DiscreteDistribution::bernoulli(p);
    let mut out = Vec::new();
    let singles: Vec<Vec<usize>> = (0..6).map(|j| vec![j]).collect();
    out.push(entry("disjoint-rare", unweighted(6, &singles, vec![b(0.01)?; 6])?));
    let pairs: Vec<Vec<usize>> = (0..5).map(|i| if i + 1 < 5 { vec![i, i + 1] } else { vec![i] }).collect();
    out.push(entry("tower-pairs", unweighted(5, &pairs, tower_features(5, 0.1)?)?));
    let prefix: Vec<Vec<usize>> = (0..5).map(|i| (0..=i).collect()).collect();
    out.push(entry("tower-prefix", unweighted(5, &prefix, tower_features(5, 0.1)?)?));
    let suffix: Vec<Vec<usize>> = (0..5).map(|i| (i..5).collect()).collect();
    out.push(entry("tower-suffix", unweighted(5, &suffix, tower_features(5, 0.2)?)?));
    let star: Vec<Vec<usize>> = (1..6).map(|i| vec![0, i]).collect();
    let mut star_f = vec![DiscreteDistribution::two_point(10.0, 0.05)?];
    star_f.extend(std::iter::repeat_n(b(0.3)?, 5));
    out.push(entry("shared-hub", unweighted(6, &star, star_f)?));
    let pairs2 = vec![vec![0, 3], vec![1, 4], vec![2, 5], vec![0, 1], vec![3, 5], vec![2, 4]];
    out.push(entry("pair-cover", unweighted(6, &pairs2, vec![DiscreteDistribution::two_point(4.0, 0.25)?; 6])?));
    out.push(entry("with-empty-set", unweighted(2, &[vec![], vec![0], vec![0, 1]], vec![b(0.5)?, DiscreteDistribution::two_point(3.0, 0.2)?])?));
    out.push(entry("one-big-sum", unweighted(6, &[(0..6).collect()], vec![b(0.5)?; 6])?));
    let half: Vec<Vec<usize>> = (0..4).map(|i| vec![i, (i + 2) % 4]).collect();
    out.push(entry("half-bernoulli", unweighted(4, &half, vec![b(0.5)?; 4])?));
    let mixed_f = vec![
        DiscreteDistribution::two_point(100.0, 0.01)?,
        DiscreteDistribution::two_point(20.0, 0.05)?,
        b(0.6)?,
        b(0.7)?,
        DiscreteDistribution::new(vec![(0.0, 0.5), (1.0, 0.3), (2.0, 0.2)])?,
    ];
    out.push(entry("heavy-and-light", unweighted(5, &[vec![0, 2], vec![1, 3], vec![2, 3, 4], vec![0, 4]], mixed_f)?));
    Ok(out)
}

/// Multisets for the negatively associated permutation checks.
pub fn na_multisets() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 2.0, 3.0],
        vec![5.0],
        vec![0.0, 0.0, 7.0],
        vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 10.0],
        vec![4.0, 3.0, 2.0, 1.0, 0.0, 9.0],
        vec![2.5, 2.5, 2.5, 1.0],
        vec![0.0, 0.0, 0.0],
        vec![0.1, 100.0, 0.2, 50.0, 0.3],
    ]
}

/// Small instances for cross-checking the oracles.
pub fn smoke_corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = vec![
        entry("tower2-n2", tower2(2, 0.1)?),
        entry("tower2-n3", tower2(3, 0.2)?),
        entry("tower2-n4", tower2(4, 0.1)?),
        entry("tower-general-c2", tower_general(2, 0.1)?),
        entry("tower-general-c3", tower_general(3, 0.1)?),
        entry("tower-general-c4", tower_general(4, 0.2)?),
        entry("independent-3", LinearInstance::independent(vec![DiscreteDistribution::new(vec![(0.0, 0.5), (1.0, 0.3), (4.0, 0.2)])?; 3])),
    ];
    for (k, seed) in [11u64, 12, 13, 14].into_iter().enumerate() {
        out.push(entry(format!("random-small-{k}"), random_sparse(4, 4, 2, 2, &spec(k), seed)?));
    }
    let corpus = random_corpus()?;
    out.extend(corpus.into_iter().step_by(4));
    Ok(out)
}
