//! Online selection policies and the driver that enforces the budget.

use alloc::boxed::Box;
use alloc::vec::Vec;

/// One pass over an arrival sequence. The driver calls `offer` for every
/// arrival in order until the budget is exhausted.
pub trait Session {
    /// Returns `true` to take arrival `index` with observed `value`.
    fn offer(&mut self, index: usize, value: f64) -> bool;
}

/// A selector that can be replayed deterministically from a seed.
pub trait Policy: Sync {
    fn start(&self, seed: u64) -> Box<dyn Session + '_>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Comparison {
    /// Take when `x >= τ`.
    #[default]
    AtLeast,
    /// Take when `x > τ`.
    Above,
}

impl Comparison {
    #[inline]
    pub fn passes(self, x: f64, tau: f64) -> bool {
        match self {
            Comparison::AtLeast => x >= tau,
            Comparison::Above => x > tau,
        }
    }
}

/// Fixed threshold, optionally restricted to an inclusion set `S`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdPolicy {
    pub tau: f64,
    /// `inclusion[i]` says whether arrival `i` is in `S`; `None` means all.
    pub inclusion: Option<Vec<bool>>,
    pub comparison: Comparison,
}

impl ThresholdPolicy {
    pub fn new(tau: f64) -> Self {
        Self { tau, inclusion: None, comparison: Comparison::AtLeast }
    }

    pub fn strict(tau: f64) -> Self {
        Self { tau, inclusion: None, comparison: Comparison::Above }
    }

    pub fn with_inclusion(tau: f64, inclusion: Vec<bool>) -> Self {
        Self { tau, inclusion: Some(inclusion), comparison: Comparison::AtLeast }
    }

    pub fn includes(&self, index: usize) -> bool {
        self.inclusion.as_ref().is_none_or(|s| s.get(index).copied().unwrap_or(false))
    }

    #[inline]
    pub fn accepts(&self, index: usize, value: f64) -> bool {
        self.includes(index) && self.comparison.passes(value, self.tau)
    }
}

struct ThresholdSession<'a>(&'a ThresholdPolicy);

impl Session for ThresholdSession<'_> {
    fn offer(&mut self, index: usize, value: f64) -> bool {
        self.0.accepts(index, value)
    }
}

impl Policy for ThresholdPolicy {
    fn start(&self, _seed: u64) -> Box<dyn Session + '_> {
        Box::new(ThresholdSession(self))
    }
}

/// Arrivals split into disjoint buckets, each with one slot and its own
/// threshold. Arrivals with no bucket are discarded.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BucketedThresholds {
    pub bucket: Vec<Option<usize>>,
    pub included: Vec<bool>,
    pub tau: Vec<f64>,
}

impl BucketedThresholds {
    pub fn buckets(&self) -> usize {
        self.tau.len()
    }
}

struct BucketedSession<'a> {
    policy: &'a BucketedThresholds,
    filled: Vec<bool>,
}

impl Session for BucketedSession<'_> {
    fn offer(&mut self, index: usize, value: f64) -> bool {
        let Some(Some(b)) = self.policy.bucket.get(index).copied() else {
            return false;
        };
        if self.filled[b] || !self.policy.included[index] || value < self.policy.tau[b] {
            return false;
        }
        self.filled[b] = true;
        true
    }
}

impl Policy for BucketedThresholds {
    fn start(&self, _seed: u64) -> Box<dyn Session + '_> {
        Box::new(BucketedSession { policy: self, filled: alloc::vec![false; self.tau.len()] })
    }
}

/// Plays `policy` over `xs` with budget `r` and returns the total value.
pub fn play(policy: &(impl Policy + ?Sized), xs: &[f64], r: usize, seed: u64) -> f64 {
    let mut session = policy.start(seed);
    let mut left = r;
    let mut value = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if session.offer(i, x) {
            value += x;
            left -= 1;
        }
    }
    value
}

/// Like [`play`], recording the taken indices.
pub fn play_recorded(policy: &(impl Policy + ?Sized), xs: &[f64], r: usize, seed: u64, taken: &mut Vec<usize>) -> f64 {
    taken.clear();
    let mut session = policy.start(seed);
    let mut value = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if taken.len() == r {
            break;
        }
        if session.offer(i, x) {
            value += x;
            taken.push(i);
        }
    }
    value
}

/// Sum of the `r` largest entries (the offline benchmark).
pub fn top_r_sum(xs: &[f64], r: usize) -> f64 {
    if r == 0 {
        return 0.0;
    }
    if r == 1 {
        return xs.iter().copied().fold(0.0, f64::max);
    }
    if r >= xs.len() {
        return xs.iter().sum();
    }
    let mut v: Vec<f64> = xs.to_vec();
    v.select_nth_unstable_by(r - 1, |a, b| b.total_cmp(a));
    let mut top = v[..r].to_vec();
    top.sort_by(|a, b| b.total_cmp(a));
    top.iter().sum()
}
