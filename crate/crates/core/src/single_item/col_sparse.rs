use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::expected_max_of_sums;
use crate::error::{Error, Result};
use crate::model::LinearInstance;
use crate::oracle::{Estimate, OracleConfig};
use crate::policy::{Policy, Session, ThresholdPolicy};
use crate::rng;

/// Inclusion-threshold rule built from a surviving set `S`: every feature is
/// assigned to the first surviving arrival that uses it (`T_i`), and
/// `τ = ½·E[max_i Z_i]` with `Z_i = Σ_{j ∈ T_i} A_ij·Y_j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColSparsePolicy {
    pub inclusion: Vec<bool>,
    pub assigned: Vec<Vec<usize>>,
    pub expected_max_z: Estimate,
    pub policy: ThresholdPolicy,
}

impl ColSparsePolicy {
    pub fn tau(&self) -> f64 {
        self.policy.tau
    }
}

impl Policy for ColSparsePolicy {
    fn start(&self, seed: u64) -> Box<dyn Session + '_> {
        self.policy.start(seed)
    }
}

/// `T_i` for each arrival: features of `X_i` not used by an earlier arrival
/// in `S`. Empty for `i ∉ S`.
pub fn first_appearance(instance: &LinearInstance, inclusion: &[bool]) -> Vec<Vec<usize>> {
    let mut claimed = alloc::vec![false; instance.m()];
    (0..instance.n())
        .map(|i| {
            if !inclusion[i] {
                return Vec::new();
            }
            let mut t = Vec::new();
            for e in instance.row(i) {
                if !claimed[e.col] {
                    claimed[e.col] = true;
                    t.push(e.col);
                }
            }
            t
        })
        .collect()
}

pub fn col_sparse_with_inclusion(instance: &LinearInstance, inclusion: Vec<bool>, cfg: &OracleConfig) -> Result<ColSparsePolicy> {
    if inclusion.len() != instance.n() {
        return Err(Error::InvalidArgument(format!("inclusion set has {} flags for {} arrivals", inclusion.len(), instance.n())));
    }
    let assigned = first_appearance(instance, &inclusion);
    let groups: Vec<Vec<(usize, f64)>> =
        assigned.iter().enumerate().map(|(i, t)| t.iter().map(|&j| (j, instance.coefficient(i, j))).collect()).collect();
    let expected_max_z = expected_max_of_sums(instance, &groups, cfg);
    let policy = ThresholdPolicy::with_inclusion(0.5 * expected_max_z.mean, inclusion.clone());
    Ok(ColSparsePolicy { inclusion, assigned, expected_max_z, policy })
}

fn survival_probability(instance: &LinearInstance) -> f64 {
    1.0 / instance.col_sparsity().max(1) as f64
}

/// Draws `S` (each arrival independently with probability `1/s_col`) from
/// `seed` and builds the rule.
pub fn col_sparse_policy(instance: &LinearInstance, seed: u64, cfg: &OracleConfig) -> Result<ColSparsePolicy> {
    let q = survival_probability(instance);
    let mut rng = rng::stream_rng(rng::derive(seed, rng::tag::CONSTRUCTION), 0);
    let inclusion = (0..instance.n()).map(|_| rng.random::<f64>() < q).collect();
    col_sparse_with_inclusion(instance, inclusion, cfg)
}

/// Every possible `S` with its probability, for exact evaluation of the
/// randomized rule. Fails past `max_components` subsets.
pub fn col_sparse_mixture(instance: &LinearInstance, cfg: &OracleConfig, max_components: usize) -> Result<Vec<(f64, ColSparsePolicy)>> {
    let n = instance.n();
    let q = survival_probability(instance);
    if q == 1.0 {
        return Ok(alloc::vec![(1.0, col_sparse_with_inclusion(instance, alloc::vec![true; n], cfg)?)]);
    }
    if n >= 63 || (1usize << n) > max_components {
        return Err(Error::InvalidArgument(format!("2^{n} inclusion sets exceed the limit of {max_components}")));
    }
    (0..1u64 << n)
        .map(|mask| {
            let inclusion: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let k = inclusion.iter().filter(|&&b| b).count() as i32;
            let w = libm::pow(q, k as f64) * libm::pow(1.0 - q, (n as i32 - k) as f64);
            Ok((w, col_sparse_with_inclusion(instance, inclusion, cfg)?))
        })
        .collect()
}
