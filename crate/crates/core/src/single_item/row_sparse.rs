use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{expected_max_independent, DiscreteDistribution, LinearInstance};
use crate::oracle::Estimate;
use crate::policy::{Policy, Session, ThresholdPolicy};
use crate::rng;

/// Feature graph of a column-normalized instance: `primaries[j]` is the
/// smallest arrival with `A_ij = 1`, and `j → j'` whenever `A_{i(j), j'} > 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureGraph {
    pub primaries: Vec<usize>,
    pub out: Vec<Vec<usize>>,
    pub into: Vec<Vec<usize>>,
}

pub fn feature_graph(instance: &LinearInstance) -> Result<FeatureGraph> {
    let m = instance.m();
    let mut primaries = Vec::with_capacity(m);
    for j in 0..m {
        match instance.column(j).find(|&(_, a)| a == 1.0) {
            Some((i, _)) => primaries.push(i),
            None => return Err(Error::NotNormalized(j)),
        }
    }
    if !instance.is_column_normalized() {
        let j = (0..m).find(|&j| instance.column(j).any(|(_, a)| a > 1.0)).unwrap_or(0);
        return Err(Error::NotNormalized(j));
    }
    let mut out = alloc::vec![Vec::new(); m];
    let mut into = alloc::vec![Vec::new(); m];
    for j in 0..m {
        for e in instance.row(primaries[j]) {
            if e.col != j {
                out[j].push(e.col);
                into[e.col].push(j);
            }
        }
    }
    Ok(FeatureGraph { primaries, out, into })
}

/// Order `π` built from the back: repeatedly remove a vertex of minimum
/// in-degree among the remaining ones (lowest index on ties).
pub fn peeling_order(graph: &FeatureGraph) -> Vec<usize> {
    let m = graph.primaries.len();
    let mut alive = alloc::vec![true; m];
    let mut indeg: Vec<usize> = graph.into.iter().map(Vec::len).collect();
    let mut order = alloc::vec![0; m];
    for pos in (0..m).rev() {
        let v = (0..m).filter(|&v| alive[v]).min_by_key(|&v| (indeg[v], v)).unwrap_or(0);
        order[pos] = v;
        alive[v] = false;
        for &w in &graph.out[v] {
            if alive[w] {
                indeg[w] -= 1;
            }
        }
    }
    order
}

/// Each `π(p)` has at most `s_row - 1` in-edges from `π(0..p)`.
pub fn satisfies_peeling(graph: &FeatureGraph, order: &[usize], s_row: usize) -> bool {
    let mut pos = alloc::vec![usize::MAX; order.len()];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    order.iter().enumerate().all(|(p, &v)| graph.into[v].iter().filter(|&&u| pos[u] < p).count() < s_row.max(1))
}

/// Outcome of one representative construction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepresentativeConstruction {
    /// `T`, in inclusion order.
    pub features: Vec<usize>,
    /// `S`, matched position by position with `features`.
    pub arrivals: Vec<usize>,
    /// `j(i)` for every arrival (`None` outside `S`).
    pub matching: Vec<Option<usize>>,
    pub primaries: Vec<usize>,
    pub order: Vec<usize>,
}

impl RepresentativeConstruction {
    pub fn inclusion(&self) -> Vec<bool> {
        self.matching.iter().map(Option::is_some).collect()
    }
}

/// Reusable sampler: graph and order are fixed, only the coins vary.
#[derive(Debug, Clone)]
pub struct RepresentativeSampler {
    pub graph: FeatureGraph,
    pub order: Vec<usize>,
    pub s_row: usize,
    n: usize,
}

impl RepresentativeSampler {
    /// Expects a column-normalized instance.
    pub fn new(instance: &LinearInstance) -> Result<Self> {
        let graph = feature_graph(instance)?;
        let order = peeling_order(&graph);
        Ok(Self { graph, order, s_row: instance.row_sparsity().max(1), n: instance.n() })
    }

    fn eligible(&self, j: usize, in_t: &[bool]) -> bool {
        !self.graph.out[j].iter().chain(&self.graph.into[j]).any(|&k| in_t[k])
    }

    fn finish(&self, features: Vec<usize>) -> RepresentativeConstruction {
        let mut matching = alloc::vec![None; self.n];
        let arrivals: Vec<usize> = features.iter().map(|&j| self.graph.primaries[j]).collect();
        for (&j, &i) in features.iter().zip(&arrivals) {
            matching[i] = Some(j);
        }
        RepresentativeConstruction { features, arrivals, matching, primaries: self.graph.primaries.clone(), order: self.order.clone() }
    }

    /// Sweeps `π`; an eligible feature joins `T` with probability `1/s_row`.
    pub fn sample(&self, seed: u64) -> RepresentativeConstruction {
        let mut rng = rng::stream_rng(rng::derive(seed, rng::tag::CONSTRUCTION), 0);
        let q = 1.0 / self.s_row as f64;
        let mut in_t = alloc::vec![false; self.graph.primaries.len()];
        let mut features = Vec::new();
        for &j in &self.order {
            let coin = rng.random::<f64>() < q;
            if coin && self.eligible(j, &in_t) {
                in_t[j] = true;
                features.push(j);
            }
        }
        self.finish(features)
    }

    /// Every reachable outcome with its probability. Fails past `limit`.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<(f64, RepresentativeConstruction)>> {
        let q = 1.0 / self.s_row as f64;
        let mut out = Vec::new();
        let mut in_t = alloc::vec![false; self.graph.primaries.len()];
        let mut features = Vec::new();
        self.branch(0, 1.0, q, &mut in_t, &mut features, &mut out, limit)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn branch(
        &self,
        pos: usize,
        w: f64,
        q: f64,
        in_t: &mut [bool],
        features: &mut Vec<usize>,
        out: &mut Vec<(f64, RepresentativeConstruction)>,
        limit: usize,
    ) -> Result<()> {
        if pos == self.order.len() {
            if out.len() == limit {
                return Err(Error::InvalidArgument(format!("more than {limit} construction outcomes")));
            }
            out.push((w, self.finish(features.clone())));
            return Ok(());
        }
        let j = self.order[pos];
        if !self.eligible(j, in_t) {
            return self.branch(pos + 1, w, q, in_t, features, out, limit);
        }
        in_t[j] = true;
        features.push(j);
        self.branch(pos + 1, w * q, q, in_t, features, out, limit)?;
        features.pop();
        in_t[j] = false;
        if q < 1.0 {
            self.branch(pos + 1, w * (1.0 - q), q, in_t, features, out, limit)?;
        }
        Ok(())
    }
}

/// Runs one construction on a column-normalized instance.
pub fn representative_construction(instance: &LinearInstance, seed: u64) -> Result<RepresentativeConstruction> {
    Ok(RepresentativeSampler::new(instance)?.sample(seed))
}

/// Structural checks: `j(·)` is a bijection `S → T` with `A_{i,j(i)} = 1`,
/// and `A_{i', j(i)} = 0` for distinct `i, i' ∈ S`.
pub fn check_construction(instance: &LinearInstance, c: &RepresentativeConstruction) -> core::result::Result<(), String> {
    if c.features.len() != c.arrivals.len() {
        return Err(format!("|T| = {} but |S| = {}", c.features.len(), c.arrivals.len()));
    }
    let in_s = c.inclusion();
    if in_s.iter().filter(|&&b| b).count() != c.arrivals.len() {
        return Err("two features share a matched arrival".into());
    }
    for (&j, &i) in c.features.iter().zip(&c.arrivals) {
        if instance.coefficient(i, j) != 1.0 {
            return Err(format!("A[{i}][{j}] = {} is not 1", instance.coefficient(i, j)));
        }
        if let Some((other, a)) = instance.column(j).find(|&(k, _)| k != i && in_s[k]) {
            return Err(format!("arrival {other} in S also sees feature {j} (coefficient {a})"));
        }
    }
    Ok(())
}

/// Inclusion-threshold rule on `S` from a representative construction, with
/// `Z_i = Y'_{j(i)}` (normalized features) and `τ = ½·E[max_i Z_i]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RowSparsePolicy {
    pub construction: RepresentativeConstruction,
    pub expected_max_z: Estimate,
    pub policy: ThresholdPolicy,
}

impl RowSparsePolicy {
    pub fn tau(&self) -> f64 {
        self.policy.tau
    }

    fn from_construction(normalized: &LinearInstance, construction: RepresentativeConstruction) -> Self {
        let z: Vec<&DiscreteDistribution> = construction.features.iter().map(|&j| normalized.feature(j)).collect();
        let e = expected_max_independent(&z);
        let policy = ThresholdPolicy::with_inclusion(0.5 * e, construction.inclusion());
        Self { construction, expected_max_z: Estimate::exact(e, z.len() as u64), policy }
    }
}

impl Policy for RowSparsePolicy {
    fn start(&self, seed: u64) -> Box<dyn Session + '_> {
        self.policy.start(seed)
    }
}

/// Normalizes, samples one construction from `seed` and builds the rule.
pub fn row_sparse_policy(instance: &LinearInstance, seed: u64) -> Result<RowSparsePolicy> {
    let normalized = instance.normalize_columns()?;
    let construction = RepresentativeSampler::new(&normalized)?.sample(seed);
    Ok(RowSparsePolicy::from_construction(&normalized, construction))
}

/// Every construction outcome with its probability, for exact evaluation.
pub fn row_sparse_mixture(instance: &LinearInstance, max_components: usize) -> Result<Vec<(f64, RowSparsePolicy)>> {
    let normalized = instance.normalize_columns()?;
    let sampler = RepresentativeSampler::new(&normalized)?;
    Ok(sampler.enumerate(max_components)?.into_iter().map(|(w, c)| (w, RowSparsePolicy::from_construction(&normalized, c))).collect())
}
