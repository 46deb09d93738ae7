use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng;

use super::bucket::{compute_bucket_config, run_bucket_indexed, BucketConfig, BucketRun, SelectionTranscript, Step, Take};
use crate::error::{Error, Result};
use crate::model::{DiscreteDistribution, LinearInstance};
use crate::oracle::OracleConfig;
use crate::policy::{Policy, Session};
use crate::rng;

/// `min(0.9, (s_col/r)^{1/5}·(ln r)^{6/5})`, falling back to 0.9 when the
/// formula is not positive (`r = 1`).
pub fn default_eps_prime(s_col: usize, r: usize) -> f64 {
    let v = libm::pow(s_col as f64 / r as f64, 0.2) * libm::pow(libm::log(r as f64), 1.2);
    if v > 0.0 { v.min(0.9) } else { 0.9 }
}

/// Uniform random split of the arrivals into `ceil(s_col/ε′)` groups, each
/// with budget `floor(ε′·r/s_col)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupPartition {
    pub eps_prime: f64,
    pub groups: usize,
    pub assignment: Vec<usize>,
    pub budget: usize,
}

impl GroupPartition {
    pub fn new(n: usize, s_col: usize, r: usize, eps_prime: f64, seed: u64) -> Result<Self> {
        if !(eps_prime > 0.0 && eps_prime <= 1.0) {
            return Err(Error::EpsilonOutOfRange { value: eps_prime, range: "(0, 1]" });
        }
        let s = s_col.max(1);
        let budget = libm::floor(eps_prime * r as f64 / s as f64) as usize;
        if budget == 0 {
            return Err(Error::BudgetUnderflow { eps_prime, r, s_col: s });
        }
        let groups = (libm::ceil(s as f64 / eps_prime) as usize).max(1);
        let mut g = rng::stream_rng(rng::derive(seed, rng::tag::GROUP), 0);
        let assignment = (0..n).map(|_| g.random_range(0..groups)).collect();
        Ok(Self { eps_prime, groups, assignment, budget })
    }

    pub fn members(&self, group: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == group).collect()
    }
}

/// `Z′_i` terms: the features of row `i` used by no other arrival of its
/// group.
pub fn unique_features(instance: &LinearInstance, partition: &GroupPartition) -> Vec<Vec<(usize, f64)>> {
    let mut uses = alloc::vec![0usize; partition.groups * instance.m()];
    for e in instance.entries() {
        uses[partition.assignment[e.row] * instance.m() + e.col] += 1;
    }
    (0..instance.n())
        .map(|i| {
            let g = partition.assignment[i];
            instance.row(i).iter().filter(|e| uses[g * instance.m() + e.col] == 1).map(|e| (e.col, e.coef)).collect()
        })
        .collect()
}

/// Group-partition reduction for column-sparse instances: each group runs
/// its own bucket algorithm, configured on the `Z′` laws of its members.
/// Leftover global budget is not used.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColSparseMulti {
    pub r: usize,
    pub partition: GroupPartition,
    pub z_prime: Vec<Vec<(usize, f64)>>,
    /// `None` for empty groups.
    pub configs: Vec<Option<BucketConfig>>,
}

impl ColSparseMulti {
    /// Seed handed to the bucket run of `group`.
    pub fn group_seed(seed: u64, group: usize) -> u64 {
        rng::derive(seed, group as u64)
    }

    /// Runs every group on the realized values `xs`.
    pub fn run(&self, xs: &[f64], seed: u64) -> Vec<SelectionTranscript> {
        (0..self.partition.groups)
            .map(|g| match &self.configs[g] {
                Some(cfg) => {
                    let arrivals = self.partition.members(g).into_iter().map(|i| (i, xs[i]));
                    run_bucket_indexed(cfg, arrivals, Self::group_seed(seed, g))
                }
                None => SelectionTranscript::default(),
            })
            .collect()
    }
}

/// Takes of all groups in arrival order.
pub fn merge_takes(parts: &[SelectionTranscript]) -> Vec<Take> {
    let mut all: Vec<Take> = parts.iter().flat_map(|t| t.taken.iter().copied()).collect();
    all.sort_by_key(|t| t.index);
    all
}

/// Builds the partition from `seed` and a bucket config per group. `ε` is
/// the bucket algorithm's parameter, `ε′` the partition's.
pub fn col_sparse_multi(
    instance: &LinearInstance,
    r: usize,
    eps_prime: f64,
    epsilon: f64,
    oracle_budget: u64,
    seed: u64,
    cfg: &OracleConfig,
) -> Result<ColSparseMulti> {
    let partition = GroupPartition::new(instance.n(), instance.col_sparsity(), r, eps_prime, seed)?;
    let z_prime = unique_features(instance, &partition);
    let mut configs = Vec::with_capacity(partition.groups);
    for g in 0..partition.groups {
        let members = partition.members(g);
        if members.is_empty() {
            configs.push(None);
            continue;
        }
        let dists = members
            .iter()
            .map(|&i| {
                let terms: Vec<(f64, &DiscreteDistribution)> = z_prime[i].iter().map(|&(j, a)| (a, instance.feature(j))).collect();
                DiscreteDistribution::linear_combination(&terms, cfg.convolution_cap)
            })
            .collect::<Result<Vec<_>>>()?;
        let group_seed = rng::derive(rng::derive(seed, rng::tag::ORACLE), g as u64);
        configs.push(Some(compute_bucket_config(&dists, partition.budget, epsilon, oracle_budget, group_seed, cfg)?));
    }
    Ok(ColSparseMulti { r, partition, z_prime, configs })
}

struct GroupSession<'a> {
    owner: &'a ColSparseMulti,
    runs: Vec<Option<BucketRun<'a>>>,
}

impl Session for GroupSession<'_> {
    fn offer(&mut self, index: usize, value: f64) -> bool {
        let g = self.owner.partition.assignment[index];
        self.runs[g].as_mut().is_some_and(|run| matches!(run.offer(value), Step::Take(_)))
    }
}

impl Policy for ColSparseMulti {
    fn start(&self, seed: u64) -> Box<dyn Session + '_> {
        let runs = self.configs.iter().enumerate().map(|(g, c)| c.as_ref().map(|c| BucketRun::new(c, Self::group_seed(seed, g)))).collect();
        Box::new(GroupSession { owner: self, runs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_item::bucket::run_bucket_on;

    fn shared_pair() -> LinearInstance {
        let f = alloc::vec![DiscreteDistribution::bernoulli(0.5).unwrap(); 3];
        // feature 1 is shared by both arrivals
        LinearInstance::new(2, 3, alloc::vec![(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0), (1, 2, 1.0)], f).unwrap()
    }

    #[test]
    fn shared_feature_across_groups_counts_twice() {
        let inst = shared_pair();
        let p = GroupPartition { eps_prime: 1.0, groups: 2, assignment: alloc::vec![0, 1], budget: 1 };
        assert_eq!(unique_features(&inst, &p), [alloc::vec![(0, 1.0), (1, 1.0)], alloc::vec![(1, 1.0), (2, 1.0)]]);
    }

    #[test]
    fn shared_feature_within_group_dropped() {
        let inst = shared_pair();
        let p = GroupPartition { eps_prime: 1.0, groups: 2, assignment: alloc::vec![1, 1], budget: 1 };
        assert_eq!(unique_features(&inst, &p), [alloc::vec![(0, 1.0)], alloc::vec![(2, 1.0)]]);
    }

    #[test]
    fn partition_sizes() {
        let p = GroupPartition::new(10, 3, 20, 0.5, 1).unwrap();
        assert_eq!((p.groups, p.budget), (6, 3));
        assert!(p.assignment.iter().all(|&g| g < 6));
        assert!(p.groups * p.budget <= 20);
        assert!(matches!(GroupPartition::new(10, 3, 2, 0.5, 1), Err(Error::BudgetUnderflow { .. })));
        assert!(GroupPartition::new(10, 3, 20, 0.0, 1).is_err());
    }

    #[test]
    fn unit_sparsity_matches_plain_bucket_run() {
        let cfg = OracleConfig::default();
        let z: Vec<DiscreteDistribution> = (1..=6).map(|k| DiscreteDistribution::two_point(k as f64, 0.4).unwrap()).collect();
        let inst = LinearInstance::independent(z.clone());
        let multi = col_sparse_multi(&inst, 3, 1.0, 0.3, 1000, 4, &cfg).unwrap();
        assert_eq!(multi.partition.groups, 1);
        let plain = compute_bucket_config(&z, 3, 0.3, 1000, rng::derive(rng::derive(4, rng::tag::ORACLE), 0), &cfg).unwrap();
        assert_eq!(multi.configs[0].as_ref(), Some(&plain));
        let xs = [6.0, 0.0, 3.0, 4.0, 5.0, 0.0];
        assert_eq!(multi.run(&xs, 8)[0], run_bucket_on(&plain, &xs, ColSparseMulti::group_seed(8, 0)));
    }
}
