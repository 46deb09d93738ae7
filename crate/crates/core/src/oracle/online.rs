//! Optimal online stopping by recursion over observation-prefix groups, and
//! an independent brute-force search over prefix-keyed decision tables.

use alloc::vec::Vec;

use super::{Estimate, OracleConfig, ScenarioTable};
use crate::error::{Error, Result};
use crate::model::LinearInstance;

/// Observation key of a value: the `f64` rounded to a 40-bit mantissa.
///
/// Two scenarios are indistinguishable at step `i` when their keys agree on
/// every observed value. Plain bit equality would separate scenarios whose
/// values differ only by summation rounding (for example `ε^3·ε^-4` against
/// `ε^-1`), which would let the recursion learn hidden features. Keying by a
/// function of the value keeps the grouping transitive.
#[inline]
pub fn obs_key(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        (x.to_bits() + (1 << 11)) >> 12
    }
}

struct Dp<'a> {
    table: &'a ScenarioTable,
    r: usize,
}

impl Dp<'_> {
    /// Unnormalized optimal value with `k` picks left, `k = 0..=r`, summed
    /// over the scenarios in `members` from arrival `i` on.
    fn solve(&self, i: usize, members: &mut [u32]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.r + 1];
        if i == self.table.n() || members.is_empty() {
            return out;
        }
        let t = self.table;
        members.sort_by_key(|&s| obs_key(t.x(s as usize)[i]));
        let mut start = 0;
        while start < members.len() {
            let key = obs_key(t.x(members[start] as usize)[i]);
            let mut end = start + 1;
            while end < members.len() && obs_key(t.x(members[end] as usize)[i]) == key {
                end += 1;
            }
            let group = &mut members[start..end];
            let reward: f64 = group.iter().map(|&s| t.prob(s as usize) * t.x(s as usize)[i]).sum();
            let later = self.solve(i + 1, group);
            out[0] += later[0];
            for k in 1..=self.r {
                // ties go to taking
                let take = reward + later[k - 1];
                out[k] += if take >= later[k] { take } else { later[k] };
            }
            start = end;
        }
        out
    }
}

/// Value of the best online policy that observes `X_1, X_2, ...` and keeps
/// at most `r` of them.
pub fn exact_online_optimum(instance: &LinearInstance, r: usize, cfg: &OracleConfig) -> Result<Estimate> {
    let table = ScenarioTable::build(instance, cfg.dp_cap)?;
    let mut members: Vec<u32> = (0..table.len() as u32).collect();
    let values = Dp { table: &table, r }.solve(0, &mut members);
    Ok(Estimate::exact(values[r] / table.total_probability(), table.len() as u64))
}

struct Node {
    reward: f64,
    /// Stopping here is an allowed choice.
    can_stop: bool,
    /// Prophet value of the subtree: no rule below this node beats it.
    bound: f64,
    children: Vec<usize>,
}

fn build_tree(table: &ScenarioTable, i: usize, members: &mut [u32], nodes: &mut Vec<Node>) -> Vec<usize> {
    let n = table.n();
    let mut ids = Vec::new();
    if i == n {
        return ids;
    }
    members.sort_by_key(|&s| obs_key(table.x(s as usize)[i]));
    let mut start = 0;
    while start < members.len() {
        let key = obs_key(table.x(members[start] as usize)[i]);
        let mut end = start + 1;
        while end < members.len() && obs_key(table.x(members[end] as usize)[i]) == key {
            end += 1;
        }
        let group = &mut members[start..end];
        let p = |s: u32| table.prob(s as usize);
        let reward: f64 = group.iter().map(|&s| p(s) * table.x(s as usize)[i]).sum();
        let bound: f64 = group.iter().map(|&s| p(s) * table.x(s as usize)[i..].iter().fold(0.0f64, |a, &b| a.max(b))).sum();
        let id = nodes.len();
        // stopping on the last arrival and continuing past a zero are dominant
        let last = i + 1 == n;
        nodes.push(Node { reward, can_stop: last || key != 0, bound, children: Vec::new() });
        if !last {
            let children = build_tree(table, i + 1, group, nodes);
            nodes[id].children = children;
        }
        ids.push(id);
        start = end;
    }
    ids
}

struct Search<'a> {
    nodes: &'a [Node],
    best: f64,
    visited: u64,
    limit: u64,
}

impl Search<'_> {
    fn bound(&self, ids: &[usize]) -> f64 {
        ids.iter().map(|&id| self.nodes[id].bound).sum()
    }

    /// Past the limit everything counts as hopeless.
    fn hopeless(&self, upper: f64) -> bool {
        self.visited > self.limit || upper < self.best * (1.0 - 1e-12)
    }

    /// Every rule on the forest `ids`; `acc` is the value fixed so far and
    /// `outside` bounds the subtrees still to be chosen by the callers.
    fn forest(&mut self, ids: &[usize], acc: f64, outside: f64, k: &mut dyn FnMut(&mut Self, f64)) {
        self.visited += 1;
        if self.hopeless(acc + self.bound(ids) + outside) {
            return;
        }
        match ids.split_first() {
            None => k(self, acc),
            Some((&id, rest)) => {
                let rest_bound = self.bound(rest);
                self.tree(id, acc, outside + rest_bound, &mut |s, v| s.forest(rest, v, outside, k));
            }
        }
    }

    fn tree(&mut self, id: usize, acc: f64, outside: f64, k: &mut dyn FnMut(&mut Self, f64)) {
        let nodes = self.nodes;
        let node = &nodes[id];
        let go = !node.children.is_empty();
        // the likelier branch first, for an early incumbent
        let stop_first = node.can_stop && (!go || 2.0 * node.reward >= self.bound(&node.children));
        if stop_first {
            k(self, acc + node.reward);
        }
        if go {
            self.forest(&node.children, acc, outside, k);
        }
        if node.can_stop && !stop_first {
            k(self, acc + node.reward);
        }
    }
}

/// Single-item online optimum by exhaustive search over stop/continue tables
/// keyed by observation prefix.
///
/// Tables that differ only below a stop are the same rule, so each distinct
/// rule is visited at most once and scored from scratch. Partial rules whose
/// prophet bound cannot beat the best complete rule are cut. Fails with
/// [`Error::BruteForceTooLarge`] after `cfg.brute_force_steps` search steps.
pub fn brute_force_online_optimum(instance: &LinearInstance, cfg: &OracleConfig) -> Result<Estimate> {
    let table = ScenarioTable::build(instance, cfg.dp_cap)?;
    let mut members: Vec<u32> = (0..table.len() as u32).collect();
    let mut nodes = Vec::new();
    let roots = build_tree(&table, 0, &mut members, &mut nodes);
    let mut search = Search { nodes: &nodes, best: 0.0, visited: 0, limit: cfg.brute_force_steps };
    search.forest(&roots, 0.0, 0.0, &mut |s, v| s.best = s.best.max(v));
    if search.visited > search.limit {
        return Err(Error::BruteForceTooLarge { steps: search.visited, limit: search.limit });
    }
    Ok(Estimate::exact(search.best / table.total_probability(), table.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generators::{tower2, tower_general};
    use crate::model::DiscreteDistribution;

    #[test]
    fn two_tower_optimum() {
        let cfg = OracleConfig::default();
        let t = tower2(2, 0.1).unwrap();
        let v = exact_online_optimum(&t, 1, &cfg).unwrap().mean;
        assert!((v - 1.18).abs() < 1e-12, "{v}");
        let b = brute_force_online_optimum(&t, &cfg).unwrap().mean;
        assert!((v - b).abs() < 1e-12);
    }

    #[test]
    fn single_arrival_is_its_mean() {
        let cfg = OracleConfig::default();
        let d = DiscreteDistribution::new(alloc::vec![(1.0, 0.25), (3.0, 0.75)]).unwrap();
        let inst = LinearInstance::independent(alloc::vec![d]);
        assert!((exact_online_optimum(&inst, 1, &cfg).unwrap().mean - 2.5).abs() < 1e-12);
    }

    #[test]
    fn general_tower_is_nearly_worthless_online() {
        let cfg = OracleConfig::default();
        let eps = 1e-3;
        let t = tower_general(5, eps).unwrap();
        let v = exact_online_optimum(&t, 1, &cfg).unwrap().mean;
        assert!(v <= 1.0 / ((1.0 - eps) * (1.0 - eps)) + 1e-6, "{v}");
    }

    #[test]
    fn keys_merge_rounding_twins() {
        let eps: f64 = 1e-3;
        let a = libm::pow(eps, 3.0) * libm::pow(1.0 / eps, 4.0);
        let b = libm::pow(1.0 / eps, 1.0);
        assert_eq!(obs_key(a), obs_key(b));
        assert_ne!(obs_key(1.0), obs_key(1.0 + 1e-9));
    }
}
