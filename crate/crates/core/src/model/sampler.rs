use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Source of i.i.d. arrival vectors. `draw(seed, index)` must be a pure
/// function of its arguments.
pub trait JointSampler: Sync {
    fn dim(&self) -> usize;

    fn draw(&self, seed: u64, index: u64, out: &mut [f64]);

    /// `E[max_i X_i]` when it is known in closed form.
    fn exact_expected_max(&self) -> Option<f64> {
        None
    }
}

/// Uniformly random permutation of a fixed multiset. Such vectors are
/// negatively associated.
#[derive(Debug, Clone, PartialEq)]
pub struct NaPermutation {
    values: Vec<f64>,
}

impl NaPermutation {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("permutation sampler needs at least one value".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("permutation values must be finite and nonnegative".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// All `n!` orderings (with repetition for equal values), each equally
    /// likely. Intended for `n <= 8`.
    pub fn all_orderings(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        permute(&mut idx, 0, &mut |p| out.push(p.iter().map(|&k| self.values[k]).collect()));
        out
    }
}

fn permute(idx: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for s in k..idx.len() {
        idx.swap(k, s);
        permute(idx, k + 1, visit);
        idx.swap(k, s);
    }
}

impl JointSampler for NaPermutation {
    fn dim(&self) -> usize {
        self.values.len()
    }

    fn draw(&self, seed: u64, index: u64, out: &mut [f64]) {
        out.copy_from_slice(&self.values);
        let mut rng = rng::stream_rng(seed, index);
        for k in (1..out.len()).rev() {
            let s = rng.random_range(0..=k);
            out.swap(k, s);
        }
    }

    fn exact_expected_max(&self) -> Option<f64> {
        Some(self.values.iter().copied().fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_permutations() {
        let s = NaPermutation::new(alloc::vec![1.0, 2.0, 3.0]).unwrap();
        let mut out = [0.0; 3];
        for k in 0..100 {
            s.draw(5, k, &mut out);
            let mut sorted = out;
            sorted.sort_by(f64::total_cmp);
            assert_eq!(sorted, [1.0, 2.0, 3.0]);
        }
        let single = NaPermutation::new(alloc::vec![5.0]).unwrap();
        let mut one = [0.0];
        single.draw(0, 0, &mut one);
        assert_eq!(one, [5.0]);
        assert_eq!(s.all_orderings().len(), 6);
        assert!(NaPermutation::new(alloc::vec![]).is_err());
    }

    #[test]
    fn position_frequencies_are_uniform() {
        // each slot holds 7 w.p. 1/3; 3 sigma binomial band over 10^4 draws
        let s = NaPermutation::new(alloc::vec![0.0, 0.0, 7.0]).unwrap();
        let draws = 10_000u64;
        let mut hits = [0u64; 3];
        let mut out = [0.0; 3];
        for k in 0..draws {
            s.draw(11, k, &mut out);
            for (h, &v) in hits.iter_mut().zip(&out) {
                if v == 7.0 {
                    *h += 1;
                }
            }
        }
        let p = 1.0 / 3.0;
        let sigma = libm::sqrt(p * (1.0 - p) / draws as f64);
        for h in hits {
            assert!((h as f64 / draws as f64 - p).abs() <= 3.0 * sigma, "{hits:?}");
        }
    }
}
