use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a distribution.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Finite-support distribution over nonnegative reals.
///
/// Atoms are stored with strictly ascending values and probabilities in
/// `(0, 1]`. A suffix-sum table makes `Pr[V > t]` accurate even when the
/// upper atoms carry tiny mass (tower variables go down to `ε^i`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>"))]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
    // upper[k] = sum of probs of atoms k.. (summed from the top)
    upper: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut total = 0.0;
        for (k, &(v, p)) in atoms.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidDistribution(format!("value {v} is not a finite nonnegative number")));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidDistribution(format!("probability {p} outside (0, 1]")));
            }
            if k > 0 && atoms[k - 1].0 >= v {
                return Err(Error::InvalidDistribution("values must be distinct and ascending".into()));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let mut upper = alloc::vec![0.0; atoms.len() + 1];
        for k in (0..atoms.len()).rev() {
            upper[k] = upper[k + 1] + atoms[k].1;
        }
        upper.pop();
        Ok(Self { atoms, upper })
    }

    /// Sorts, merges bit-identical values and drops zero-mass atoms.
    pub fn from_unsorted(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.retain(|&(_, p)| p != 0.0);
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            match merged.last_mut() {
                Some(last) if last.0.to_bits() == v.to_bits() => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        Self::new(merged)
    }

    pub fn point(value: f64) -> Result<Self> {
        Self::new(alloc::vec![(value, 1.0)])
    }

    /// `value` with probability `p`, else 0.
    pub fn two_point(value: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!("probability {p} outside [0, 1]")));
        }
        Self::from_unsorted(alloc::vec![(0.0, 1.0 - p), (value, p)])
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::two_point(1.0, p)
    }

    /// Tower variable of the given level: `(1/ε)^level` with probability `ε^level`, else 0.
    pub fn tower(level: i32, eps: f64) -> Result<Self> {
        let value = libm::pow(1.0 / eps, level as f64);
        let p = libm::pow(eps, level as f64);
        Self::from_unsorted(alloc::vec![(0.0, 1.0 - p), (value, p)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, p)| v * p).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn is_constant(&self) -> bool {
        self.atoms.len() == 1
    }

    /// `Pr[V > t]`.
    pub fn survival(&self, t: f64) -> f64 {
        let k = self.atoms.partition_point(|&(v, _)| v <= t);
        if k == self.atoms.len() {
            0.0
        } else {
            self.upper[k]
        }
    }

    /// `Pr[V <= t]`.
    pub fn cdf(&self, t: f64) -> f64 {
        let k = self.atoms.partition_point(|&(v, _)| v <= t);
        self.atoms[..k].iter().map(|a| a.1).sum()
    }

    /// `E[V · 1(V > t)]`.
    pub fn tail_mass(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 > t).map(|&(v, p)| v * p).sum()
    }

    /// Inverse-CDF sample for `u ∈ [0, 1)`. Works from the top so that
    /// small upper atoms keep their exact mass.
    pub fn sample(&self, u: f64) -> f64 {
        // Pr[returned index >= k] = upper[k]; pick the largest k with 1 - u <= upper[k].
        let w = 1.0 - u;
        let k = self.upper.partition_point(|&s| s >= w);
        self.atoms[k.saturating_sub(1)].0
    }

    /// Distribution of `c · V` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidDistribution(format!("scale {c} must be positive")));
        }
        Self::from_unsorted(self.atoms.iter().map(|&(v, p)| (v * c, p)).collect())
    }

    /// `V` conditioned on `V <= t`; `None` when that event has no mass.
    pub fn conditioned_at_most(&self, t: f64) -> Option<Self> {
        let kept: Vec<(f64, f64)> = self.atoms.iter().copied().filter(|a| a.0 <= t).collect();
        let mass: f64 = kept.iter().map(|a| a.1).sum();
        if kept.is_empty() || mass <= 0.0 {
            return None;
        }
        let mut kept: Vec<(f64, f64)> = kept.into_iter().map(|(v, p)| (v, p / mass)).collect();
        // absorb rounding so the mass check passes
        let total: f64 = kept.iter().map(|a| a.1).sum();
        let last = kept.len() - 1;
        kept[last].1 += 1.0 - total;
        Self::new(kept).ok()
    }

    /// Exact law of `Σ c_k · V_k` for independent `V_k`. Fails when the
    /// support would exceed `cap` atoms at any intermediate step.
    pub fn linear_combination(terms: &[(f64, &DiscreteDistribution)], cap: usize) -> Result<Self> {
        let mut acc: Vec<(f64, f64)> = alloc::vec![(0.0, 1.0)];
        for &(c, d) in terms {
            let size = acc.len() as u128 * d.len() as u128;
            if size > cap as u128 {
                return Err(Error::SupportTooLarge { size, cap: cap as u64 });
            }
            let mut next = Vec::with_capacity(size as usize);
            for &(v, p) in &acc {
                for &(w, q) in d.atoms() {
                    next.push((v + c * w, p * q));
                }
            }
            acc = Self::from_unsorted(next)?.atoms;
        }
        Self::from_unsorted(acc)
    }
}

impl TryFrom<Vec<(f64, f64)>> for DiscreteDistribution {
    type Error = Error;
    fn try_from(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<DiscreteDistribution> for Vec<(f64, f64)> {
    fn from(d: DiscreteDistribution) -> Self {
        d.atoms
    }
}

/// `Pr[max_k V_k > t]` for independent `V_k`, computed as
/// `-expm1(Σ log1p(-Pr[V_k > t]))` to keep tiny tails.
pub fn max_survival(dists: &[&DiscreteDistribution], t: f64) -> f64 {
    let mut log_all_below = 0.0;
    for d in dists {
        let s = d.survival(t);
        if s >= 1.0 {
            return 1.0;
        }
        log_all_below += libm::log1p(-s);
    }
    -libm::expm1(log_all_below)
}

/// `Pr[max_k V_k <= t]` for independent `V_k`.
pub fn max_cdf(dists: &[&DiscreteDistribution], t: f64) -> f64 {
    dists.iter().map(|d| d.cdf(t)).product()
}

/// `E[max_k V_k]` for independent `V_k` (0 for an empty family).
pub fn expected_max_independent(dists: &[&DiscreteDistribution]) -> f64 {
    let mut values: Vec<f64> = dists.iter().flat_map(|d| d.atoms().iter().map(|a| a.0)).collect();
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| a.to_bits() == b.to_bits());
    // E[max] = ∫ Pr[max > t] dt, piecewise constant between support points
    let mut total = values[0];
    for w in values.windows(2) {
        total += (w[1] - w[0]) * max_survival(dists, w[0]);
    }
    total
}
