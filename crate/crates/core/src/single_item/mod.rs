//! Single-selection policies.
//!
//! Every policy here is a (possibly randomized) inclusion-threshold rule:
//! it commits to a set `S` of arrivals and a threshold `τ`, then takes the
//! first `i ∈ S` with `X_i >= τ`.

mod col_sparse;
mod row_sparse;
mod unweighted;

use alloc::vec::Vec;

pub use col_sparse::{col_sparse_mixture, col_sparse_policy, col_sparse_with_inclusion, first_appearance, ColSparsePolicy};
pub use row_sparse::{
    check_construction, feature_graph, peeling_order, representative_construction, row_sparse_mixture, row_sparse_policy,
    satisfies_peeling, FeatureGraph, RepresentativeConstruction, RepresentativeSampler, RowSparsePolicy,
};
pub use unweighted::{unweighted_policy, ThresholdChoice, UnweightedThresholds};

use crate::error::Result;
use crate::model::{expected_max_independent, max_cdf, DiscreteDistribution, JointSampler, LinearInstance};
use crate::oracle::{mc_moments, mc_prophet_value, Estimate, OracleConfig};
use crate::policy::ThresholdPolicy;
use crate::rng;

/// `τ = ½·E[max_i Z_i]` for independent `Z_i`, computed exactly.
pub fn half_expected_max_threshold(z: &[DiscreteDistribution]) -> f64 {
    let refs: Vec<&DiscreteDistribution> = z.iter().collect();
    0.5 * expected_max_independent(&refs)
}

/// Smallest `t` with `Pr[max_i Z_i <= t] >= ½`.
pub fn median_of_max_threshold(z: &[DiscreteDistribution]) -> f64 {
    let refs: Vec<&DiscreteDistribution> = z.iter().collect();
    let mut support: Vec<f64> = z.iter().flat_map(|d| d.atoms().iter().map(|a| a.0)).collect();
    support.sort_by(f64::total_cmp);
    support.dedup();
    support.into_iter().find(|&t| max_cdf(&refs, t) >= 0.5).unwrap_or(0.0)
}

/// Laws of the independent sums `Σ_{(j, a) ∈ group} a·Y_j` (groups must use
/// disjoint features). Fails when a law exceeds `cap` atoms.
pub fn sum_distributions(instance: &LinearInstance, groups: &[Vec<(usize, f64)>], cap: usize) -> Result<Vec<DiscreteDistribution>> {
    groups
        .iter()
        .map(|g| {
            let terms: Vec<(f64, &DiscreteDistribution)> = g.iter().map(|&(j, a)| (a, instance.feature(j))).collect();
            DiscreteDistribution::linear_combination(&terms, cap)
        })
        .collect()
}

/// `E[max_g Σ_{(j, a) ∈ g} a·Y_j]` over feature-disjoint groups: exact
/// through convolution when every law fits `cfg.convolution_cap`, Monte
/// Carlo with `cfg.mc_samples` otherwise.
pub fn expected_max_of_sums(instance: &LinearInstance, groups: &[Vec<(usize, f64)>], cfg: &OracleConfig) -> Estimate {
    if let Ok(dists) = sum_distributions(instance, groups, cfg.convolution_cap) {
        let refs: Vec<&DiscreteDistribution> = dists.iter().collect();
        let atoms: u64 = dists.iter().map(|d| d.len() as u64).sum();
        return Estimate::exact(expected_max_independent(&refs), atoms);
    }
    let seed = rng::derive(cfg.seed, rng::tag::ORACLE);
    let [m] = mc_moments(cfg.mc_samples, |k| {
        let mut y = alloc::vec![0.0; instance.m()];
        instance.draw_y(seed, k, &mut y);
        let best = groups.iter().map(|g| g.iter().map(|&(j, a)| a * y[j]).sum::<f64>()).fold(0.0, f64::max);
        [best]
    });
    Estimate::from_moments(&m)
}

/// Threshold `½·E[max_i X_i]` over every arrival of a joint sampler. Uses the
/// sampler's closed form when it has one.
pub fn na_threshold_policy(sampler: &(impl JointSampler + ?Sized), samples: u64, seed: u64) -> (ThresholdPolicy, Estimate) {
    let e = match sampler.exact_expected_max() {
        Some(v) => Estimate::exact(v, 0),
        None => mc_prophet_value(sampler, 1, samples, seed),
    };
    (ThresholdPolicy::new(0.5 * e.mean), e)
}
