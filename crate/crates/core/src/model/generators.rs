//! Instance generators: tower hardness instances, random sparse corpora and
//! unweighted (0/1) set systems.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::dist::DiscreteDistribution;
use super::instance::LinearInstance;
use crate::error::{Error, Result};
use crate::rng;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange { value: eps, range: "(0, 1/2)" })
    }
}

fn tower_features(count: usize, eps: f64) -> Result<Vec<DiscreteDistribution>> {
    (1..=count as i32).map(|level| DiscreteDistribution::tower(level, eps)).collect()
}

/// `X_i = Y_i + ε·Y_{i+1}` (last row `X_n = Y_n`) over tower features.
pub fn tower2(n: usize, eps: f64) -> Result<LinearInstance> {
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(2 * n);
    for i in 0..n {
        entries.push((i, i, 1.0));
        if i + 1 < n {
            entries.push((i, i + 1, eps));
        }
    }
    LinearInstance::new(n, n, entries, tower_features(n, eps)?)
}

/// Upper-triangular `A[i][j] = ε^(j-i)` over `c` tower features.
pub fn tower_general(c: usize, eps: f64) -> Result<LinearInstance> {
    check_eps(eps)?;
    if c == 0 {
        return Err(Error::InvalidArgument("c must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(c * (c + 1) / 2);
    for i in 0..c {
        for j in i..c {
            let coef = if j == i { 1.0 } else { libm::pow(eps, (j - i) as f64) };
            entries.push((i, j, coef));
        }
    }
    LinearInstance::new(c, c, entries, tower_features(c, eps)?)
}

/// Law of the nonzero coefficients drawn by [`random_sparse`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "kebab-case"))]
pub enum CoefficientLaw {
    /// Uniform on `(lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Every coefficient is 1.
    Ones,
}

impl Default for CoefficientLaw {
    fn default() -> Self {
        CoefficientLaw::Uniform { lo: 0.0, hi: 1.0 }
    }
}

/// Law used to draw each feature's distribution in [`random_sparse`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "kebab-case"))]
pub enum FeatureLaw {
    /// Every feature has this distribution.
    Fixed { dist: DiscreteDistribution },
    /// Two-point `{0, v}` with `p` log-uniform in `[p_min, p_max]` and
    /// `v = scale / p` (so every feature has mean `scale`).
    RareLarge { p_min: f64, p_max: f64, scale: f64 },
    /// `k` atoms with values uniform in `[0, v_max]` and Dirichlet-ish weights.
    Atoms { k: usize, v_max: f64 },
}

impl Default for FeatureLaw {
    fn default() -> Self {
        FeatureLaw::RareLarge { p_min: 0.05, p_max: 0.5, scale: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureSpec {
    #[cfg_attr(feature = "serde", serde(default))]
    pub coefficients: CoefficientLaw,
    #[cfg_attr(feature = "serde", serde(default))]
    pub features: FeatureLaw,
}

fn draw_feature(law: &FeatureLaw, rng: &mut impl Rng) -> Result<DiscreteDistribution> {
    match law {
        FeatureLaw::Fixed { dist } => Ok(dist.clone()),
        FeatureLaw::RareLarge { p_min, p_max, scale } => {
            if !(*p_min > 0.0 && p_min <= p_max && *p_max <= 1.0) {
                return Err(Error::InvalidArgument(format!("bad probability range [{p_min}, {p_max}]")));
            }
            let (lo, hi) = (libm::log(*p_min), libm::log(*p_max));
            let p = libm::exp(lo + (hi - lo) * rng.random::<f64>()).min(1.0);
            DiscreteDistribution::two_point(scale / p, p)
        }
        FeatureLaw::Atoms { k, v_max } => {
            if *k == 0 {
                return Err(Error::InvalidArgument("feature law needs at least one atom".into()));
            }
            let weights: Vec<f64> = (0..*k).map(|_| 0.05 + rng.random::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            let pairs = weights.iter().map(|w| (libm::floor(rng.random::<f64>() * v_max * 100.0) / 100.0, w / total)).collect();
            DiscreteDistribution::from_unsorted(pairs)
        }
    }
}

fn draw_coefficient(law: &CoefficientLaw, rng: &mut impl Rng) -> f64 {
    match *law {
        CoefficientLaw::Uniform { lo, hi } => {
            // (lo, hi]: 1 - u lies in (0, 1]
            lo + (hi - lo) * (1.0 - rng.random::<f64>())
        }
        CoefficientLaw::Ones => 1.0,
    }
}

/// Random sparse instance with row sparsity at most `s_row` and column
/// sparsity at most `s_col`. Every feature is used by at least one arrival;
/// this needs `m <= n · s_row`.
pub fn random_sparse(n: usize, m: usize, s_row: usize, s_col: usize, spec: &FeatureSpec, seed: u64) -> Result<LinearInstance> {
    if n == 0 || m == 0 || s_row == 0 || s_col == 0 {
        return Err(Error::InfeasibleSparsity("n, m and both targets must be positive".into()));
    }
    if m > n * s_row {
        return Err(Error::InfeasibleSparsity(format!("{m} features cannot fit in {n} rows of at most {s_row} entries")));
    }
    if let CoefficientLaw::Uniform { lo, hi } = spec.coefficients {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidArgument(format!("coefficient range ({lo}, {hi}] is empty")));
        }
    }
    let mut rng = rng::stream_rng(rng::derive(seed, rng::tag::GENERATOR), 0);
    let mut row_cols: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    let mut col_count = alloc::vec![0usize; m];

    // every feature lands in some row with room
    for j in 0..m {
        let open: Vec<usize> = (0..n).filter(|&i| row_cols[i].len() < s_row).collect();
        let i = open[rng.random_range(0..open.len())];
        row_cols[i].push(j);
        col_count[j] += 1;
    }
    // top up each row to a random size, respecting column capacity
    for (i, cols) in row_cols.iter_mut().enumerate() {
        let target = rng.random_range(cols.len().max(1)..=s_row);
        while cols.len() < target {
            let open: Vec<usize> = (0..m).filter(|&j| col_count[j] < s_col && !cols.contains(&j)).collect();
            if open.is_empty() {
                break;
            }
            let j = open[rng.random_range(0..open.len())];
            cols.push(j);
            col_count[j] += 1;
        }
        let _ = i;
    }
    let mut entries = Vec::new();
    for (i, cols) in row_cols.iter().enumerate() {
        for &j in cols {
            entries.push((i, j, draw_coefficient(&spec.coefficients, &mut rng)));
        }
    }
    let features = (0..m).map(|_| draw_feature(&spec.features, &mut rng)).collect::<Result<Vec<_>>>()?;
    LinearInstance::new(n, m, entries, features)
}

/// 0/1 instance `X_i = Σ_{j ∈ S_i} Y_j`. Empty sets give `X_i ≡ 0`.
pub fn unweighted(m: usize, sets: &[Vec<usize>], features: Vec<DiscreteDistribution>) -> Result<LinearInstance> {
    let mut entries = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        for &j in set {
            if j >= m {
                return Err(Error::IndexOutOfRange { index: j, limit: m });
            }
            entries.push((i, j, 1.0));
        }
    }
    LinearInstance::new(sets.len(), m, entries, features)
}
