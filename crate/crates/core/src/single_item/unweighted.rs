use alloc::vec::Vec;

use super::{expected_max_of_sums, first_appearance};
use crate::error::{Error, Result};
use crate::model::{DiscreteDistribution, LinearInstance};
use crate::oracle::{exact_prophet_value, mc_prophet_value, Estimate, OracleConfig};
use crate::policy::ThresholdPolicy;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ThresholdChoice {
    Boundary,
    Tail,
    Core,
}

/// Candidate thresholds of the best-of-three rule for 0/1 matrices.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UnweightedThresholds {
    /// Smallest support value `τ` with `Π_j Pr[Y_j <= τ] >= ½`.
    pub boundary: f64,
    /// `p_j = Pr[Y_j > τ]`.
    pub heavy_probs: Vec<f64>,
    /// `V = E[max_i X_i | every Y_j <= τ]`.
    pub core_value: Estimate,
    /// `Σ_j E[Y_j · 1(Y_j > τ)]`.
    pub tail_mass: f64,
    /// `½·E[max_i Z_i]` with first-appearance sums `Z_i`.
    pub tau_tail: f64,
    /// `½·V`.
    pub tau_core: f64,
    pub choice: ThresholdChoice,
    pub chosen: f64,
}

fn boundary(features: &[DiscreteDistribution]) -> f64 {
    let mut support: Vec<f64> = features.iter().flat_map(|d| d.atoms().iter().map(|a| a.0)).collect();
    support.sort_by(f64::total_cmp);
    support.dedup();
    support.into_iter().find(|&t| features.iter().map(|d| d.cdf(t)).product::<f64>() >= 0.5).unwrap_or(0.0)
}

/// Computes `τ`, `τ_tail`, `τ_core` and picks one: `τ_tail` if the tail mass
/// is at least `V`, else `τ` if `τ > V/10`, else `τ_core`.
pub fn unweighted_policy(instance: &LinearInstance, cfg: &OracleConfig) -> Result<(UnweightedThresholds, ThresholdPolicy)> {
    if let Some(e) = instance.entries().iter().find(|e| e.coef != 1.0) {
        return Err(Error::NotUnweighted { row: e.row, col: e.col, value: e.coef });
    }
    let features = instance.features();
    let tau = boundary(features);
    let heavy_probs: Vec<f64> = features.iter().map(|d| d.survival(tau)).collect();
    let tail_mass: f64 = features.iter().map(|d| d.tail_mass(tau)).sum();

    let light: Vec<DiscreteDistribution> =
        features.iter().map(|d| d.conditioned_at_most(tau).unwrap_or_else(|| d.clone())).collect();
    let core = instance.with_features(light)?;
    let core_value = match exact_prophet_value(&core, 1, cfg) {
        Ok(v) => v,
        Err(Error::SupportTooLarge { .. }) => mc_prophet_value(&core, 1, cfg.mc_samples, rng::derive(cfg.seed, rng::tag::ORACLE)),
        Err(e) => return Err(e),
    };

    let all = alloc::vec![true; instance.n()];
    let groups: Vec<Vec<(usize, f64)>> = first_appearance(instance, &all).into_iter().map(|t| t.into_iter().map(|j| (j, 1.0)).collect()).collect();
    let tau_tail = 0.5 * expected_max_of_sums(instance, &groups, cfg).mean;
    let tau_core = 0.5 * core_value.mean;

    let v = core_value.mean;
    let (choice, chosen) = if tail_mass >= v {
        (ThresholdChoice::Tail, tau_tail)
    } else if tau > v / 10.0 {
        (ThresholdChoice::Boundary, tau)
    } else {
        (ThresholdChoice::Core, tau_core)
    };
    let t = UnweightedThresholds { boundary: tau, heavy_probs, core_value, tail_mass, tau_tail, tau_core, choice, chosen };
    Ok((t, ThresholdPolicy::new(chosen)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generators::unweighted;
    use crate::oracle::exact_policy_value;

    #[test]
    fn single_bernoulli_boundary() {
        let cfg = OracleConfig::default();
        let inst = unweighted(1, &[alloc::vec![0]], alloc::vec![DiscreteDistribution::bernoulli(0.9).unwrap()]).unwrap();
        let (t, _) = unweighted_policy(&inst, &cfg).unwrap();
        assert_eq!(t.boundary, 1.0);
        assert_eq!(t.tail_mass, 0.0);
    }

    #[test]
    fn disjoint_rare_features() {
        let cfg = OracleConfig::default();
        let f = alloc::vec![DiscreteDistribution::bernoulli(0.01).unwrap(); 50];
        let sets: Vec<Vec<usize>> = (0..50).map(|j| alloc::vec![j]).collect();
        let inst = unweighted(50, &sets, f).unwrap();
        let (t, _) = unweighted_policy(&inst, &cfg).unwrap();
        // 0.99^50 ≈ 0.605 already clears ½ at the zero atom
        assert_eq!(t.boundary, 0.0);
        assert!(t.heavy_probs.iter().all(|&p| (p - 0.01).abs() < 1e-15));
        assert!((t.tail_mass - 0.5).abs() < 1e-12);
        assert_eq!(t.core_value.mean, 0.0);
        assert_eq!(t.choice, ThresholdChoice::Tail);
        assert!((t.tau_tail - 0.5 * (1.0 - libm::pow(0.99, 50.0))).abs() < 1e-12);
    }

    #[test]
    fn all_zero_features() {
        let cfg = OracleConfig::default();
        let f = alloc::vec![DiscreteDistribution::point(0.0).unwrap(); 2];
        let inst = unweighted(2, &[alloc::vec![0, 1], alloc::vec![1]], f).unwrap();
        let (t, p) = unweighted_policy(&inst, &cfg).unwrap();
        assert_eq!((t.boundary, t.tau_tail, t.tau_core, t.chosen), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(exact_policy_value(&inst, &p, 1, &cfg).unwrap().mean, 0.0);
    }

    #[test]
    fn rejects_weighted() {
        let f = alloc::vec![DiscreteDistribution::bernoulli(0.5).unwrap()];
        let inst = LinearInstance::new(1, 1, alloc::vec![(0, 0, 0.5)], f).unwrap();
        assert!(matches!(unweighted_policy(&inst, &OracleConfig::default()), Err(Error::NotUnweighted { .. })));
    }
}
