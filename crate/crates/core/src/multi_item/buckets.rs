use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::LinearInstance;
use crate::oracle::{Estimate, OracleConfig};
use crate::policy::{BucketedThresholds, Policy, Session};
use crate::rng;
use crate::single_item::{expected_max_of_sums, first_appearance, row_sparse_policy, RowSparsePolicy};

/// Row-sparse reduction: arrivals go to `r` uniform buckets and each bucket
/// runs the single-item row-sparse rule on its own rows. Bucket `b` builds
/// its rule with seed `derive(seed, b)`, so `r = 1` reproduces
/// `row_sparse_policy(instance, derive(seed, 0))`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RowSparseMulti {
    pub assignment: Vec<usize>,
    pub per_bucket: Vec<RowSparsePolicy>,
    pub policy: BucketedThresholds,
}

impl Policy for RowSparseMulti {
    fn start(&self, seed: u64) -> Box<dyn Session + '_> {
        self.policy.start(seed)
    }
}

pub fn row_sparse_multi(instance: &LinearInstance, r: usize, seed: u64) -> Result<RowSparseMulti> {
    if r == 0 {
        return Err(Error::InvalidArgument("cardinality budget r must be at least 1".into()));
    }
    let n = instance.n();
    let mut g = rng::stream_rng(rng::derive(seed, rng::tag::BUCKET), 0);
    let assignment: Vec<usize> = (0..n).map(|_| if r == 1 { 0 } else { g.random_range(0..r) }).collect();
    let mut included = alloc::vec![false; n];
    let mut tau = Vec::with_capacity(r);
    let mut per_bucket = Vec::with_capacity(r);
    for b in 0..r {
        let keep: Vec<bool> = assignment.iter().map(|&a| a == b).collect();
        let (sub, _) = instance.restrict_rows(&keep);
        let p = row_sparse_policy(&sub, rng::derive(seed, b as u64))?;
        for (i, inc) in p.construction.inclusion().into_iter().enumerate() {
            if inc && keep[i] {
                included[i] = true;
            }
        }
        tau.push(p.tau());
        per_bucket.push(p);
    }
    let bucket = assignment.iter().map(|&a| Some(a)).collect();
    Ok(RowSparseMulti { assignment, per_bucket, policy: BucketedThresholds { bucket, included, tau } })
}

/// Small-`r` column-sparse rule: `c = max(r, s_col)`; each arrival joins
/// bucket `j < r` with probability `1/c` and is discarded otherwise. Within
/// a bucket, features go to their first member (`T_i`) and
/// `τ_j = ½·E[max Z_i]` over the bucket.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmallRColSparse {
    pub c: usize,
    pub assignment: Vec<Option<usize>>,
    pub assigned: Vec<Vec<usize>>,
    pub expected_max_z: Vec<Estimate>,
    pub policy: BucketedThresholds,
}

impl Policy for SmallRColSparse {
    fn start(&self, seed: u64) -> Box<dyn Session + '_> {
        self.policy.start(seed)
    }
}

fn bucket_count(instance: &LinearInstance, r: usize) -> Result<usize> {
    if r == 0 {
        return Err(Error::InvalidArgument("cardinality budget r must be at least 1".into()));
    }
    Ok(r.max(instance.col_sparsity()))
}

pub fn small_r_with_assignment(instance: &LinearInstance, r: usize, assignment: Vec<Option<usize>>, cfg: &OracleConfig) -> Result<SmallRColSparse> {
    let c = bucket_count(instance, r)?;
    if assignment.len() != instance.n() || assignment.iter().flatten().any(|&b| b >= r) {
        return Err(Error::InvalidArgument(format!("assignment must give each of {} arrivals a bucket below {r} or none", instance.n())));
    }
    let mut assigned = alloc::vec![Vec::new(); instance.n()];
    let mut expected_max_z = Vec::with_capacity(r);
    let mut tau = Vec::with_capacity(r);
    for b in 0..r {
        let members: Vec<bool> = assignment.iter().map(|&a| a == Some(b)).collect();
        let t = first_appearance(instance, &members);
        let groups: Vec<Vec<(usize, f64)>> = t.iter().enumerate().map(|(i, ts)| ts.iter().map(|&j| (j, instance.coefficient(i, j))).collect()).collect();
        let e = expected_max_of_sums(instance, &groups, cfg);
        for (i, ts) in t.into_iter().enumerate() {
            if members[i] {
                assigned[i] = ts;
            }
        }
        tau.push(0.5 * e.mean);
        expected_max_z.push(e);
    }
    let included = assignment.iter().map(Option::is_some).collect();
    let policy = BucketedThresholds { bucket: assignment.clone(), included, tau };
    Ok(SmallRColSparse { c, assignment, assigned, expected_max_z, policy })
}

pub fn small_r_col_sparse(instance: &LinearInstance, r: usize, seed: u64, cfg: &OracleConfig) -> Result<SmallRColSparse> {
    let c = bucket_count(instance, r)?;
    let mut g = rng::stream_rng(rng::derive(seed, rng::tag::CONSTRUCTION), 0);
    let assignment = (0..instance.n())
        .map(|_| {
            let k = g.random_range(0..c);
            (k < r).then_some(k)
        })
        .collect();
    small_r_with_assignment(instance, r, assignment, cfg)
}

/// Every assignment with its probability, for exact evaluation. Fails past
/// `max_components` assignments.
pub fn small_r_mixture(instance: &LinearInstance, r: usize, cfg: &OracleConfig, max_components: usize) -> Result<Vec<(f64, SmallRColSparse)>> {
    let c = bucket_count(instance, r)?;
    let n = instance.n();
    let choices = if c > r { r + 1 } else { r };
    let total = (choices as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > max_components as u128 {
        return Err(Error::InvalidArgument(format!("{choices}^{n} bucket assignments exceed the limit of {max_components}")));
    }
    let p_bucket = 1.0 / c as f64;
    let p_discard = (c - r) as f64 / c as f64;
    (0..total as u64)
        .map(|mut code| {
            let mut w = 1.0;
            let assignment = (0..n)
                .map(|_| {
                    let k = (code % choices as u64) as usize;
                    code /= choices as u64;
                    if k < r {
                        w *= p_bucket;
                        Some(k)
                    } else {
                        w *= p_discard;
                        None
                    }
                })
                .collect();
            Ok((w, small_r_with_assignment(instance, r, assignment, cfg)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generators::tower2;
    use crate::model::DiscreteDistribution;
    use crate::policy::play;
    use crate::single_item::col_sparse_with_inclusion;

    #[test]
    fn single_bucket_row_sparse_is_plain_rule() {
        let t = tower2(4, 0.1).unwrap();
        let multi = row_sparse_multi(&t, 1, 3).unwrap();
        let single = row_sparse_policy(&t, rng::derive(3, 0)).unwrap();
        assert_eq!(multi.per_bucket[0], single);
        assert_eq!(multi.policy.included, single.construction.inclusion());
        assert_eq!(multi.policy.tau[0], single.tau());
    }

    #[test]
    fn row_sparse_buckets_take_at_most_once() {
        let f = alloc::vec![DiscreteDistribution::point(1.0).unwrap(); 6];
        let inst = LinearInstance::independent(f);
        let m = row_sparse_multi(&inst, 6, 1).unwrap();
        assert!(play(&m, &[1.0; 6], 6, 0) <= 6.0);
        let m = row_sparse_multi(&inst, 2, 1).unwrap();
        assert!(play(&m, &[1.0; 6], 6, 0) <= 2.0);
    }

    #[test]
    fn small_r_unit_case_matches_col_sparse() {
        let cfg = OracleConfig::default();
        let f = alloc::vec![DiscreteDistribution::bernoulli(0.3).unwrap(); 3];
        let inst = LinearInstance::independent(f);
        let s = small_r_col_sparse(&inst, 1, 5, &cfg).unwrap();
        assert_eq!(s.assignment, [Some(0); 3]);
        let plain = col_sparse_with_inclusion(&inst, alloc::vec![true; 3], &cfg).unwrap();
        assert_eq!(s.policy.tau[0], plain.tau());
        assert_eq!(s.assigned, plain.assigned);
    }

    #[test]
    fn small_r_mixture_weights() {
        let cfg = OracleConfig::default();
        let t = tower2(3, 0.1).unwrap();
        // s_col = 2, r = 1: one bucket and a discard pile
        let mix = small_r_mixture(&t, 1, &cfg, 64).unwrap();
        assert_eq!(mix.len(), 8);
        assert!((mix.iter().map(|m| m.0).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(mix.iter().all(|m| m.1.c == 2));
    }
}
