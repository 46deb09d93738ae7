use alloc::vec::Vec;

use super::Estimate;
use crate::error::Result;
use crate::model::JointSampler;
use crate::par;
use crate::policy::{play, top_r_sum, Policy};
use crate::rng;

const CHUNK: u64 = 1024;

/// Running count, mean and centered second moment. Merging follows Chan et
/// al., so merging fixed chunks in a fixed order is reproducible.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * (other.n as f64 / n as f64);
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        Self { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (`n - 1` denominator); zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            libm::sqrt(self.variance() / self.n as f64)
        }
    }
}

/// Runs `trial(k)` for `k = 0..samples` and accumulates each of its `K`
/// outputs. Trials are independent functions of `k`.
pub fn mc_moments<const K: usize, F>(samples: u64, trial: F) -> [Moments; K]
where
    F: Fn(u64) -> [f64; K] + Sync + Send,
{
    par::map_reduce(
        samples,
        CHUNK,
        |range| {
            let mut acc = [Moments::default(); K];
            for k in range {
                for (m, v) in acc.iter_mut().zip(trial(k)) {
                    m.push(v);
                }
            }
            acc
        },
        |a, b| core::array::from_fn(|q| a[q].merge(b[q])),
    )
    .unwrap_or([Moments::default(); K])
}

/// Trial `k` draws `X` with `sampler.draw(derive(seed, DRAW), k)` and starts
/// the policy with `derive(derive(seed, POLICY), k)`.
pub fn mc_value(sampler: &(impl JointSampler + ?Sized), policy: &(impl Policy + ?Sized), r: usize, samples: u64, seed: u64) -> Estimate {
    let draw_seed = rng::derive(seed, rng::tag::DRAW);
    let policy_seed = rng::derive(seed, rng::tag::POLICY);
    let dim = sampler.dim();
    let [m] = mc_moments(samples, |k| {
        let mut x: Vec<f64> = alloc::vec![0.0; dim];
        sampler.draw(draw_seed, k, &mut x);
        [play(policy, &x, r, rng::derive(policy_seed, k))]
    });
    Estimate::from_moments(&m)
}

/// Monte Carlo `E[sum of the r largest X_i]` on the same draws as
/// [`mc_value`] with the same seed.
pub fn mc_prophet_value(sampler: &(impl JointSampler + ?Sized), r: usize, samples: u64, seed: u64) -> Estimate {
    let draw_seed = rng::derive(seed, rng::tag::DRAW);
    let dim = sampler.dim();
    let [m] = mc_moments(samples, |k| {
        let mut x: Vec<f64> = alloc::vec![0.0; dim];
        sampler.draw(draw_seed, k, &mut x);
        [top_r_sum(&x, r)]
    });
    Estimate::from_moments(&m)
}

/// Value of a randomized policy: `outer` independent constructions
/// `build(derive(derive(seed, CONSTRUCTION), o))`, each scored on `inner`
/// draws. The standard error treats each construction's mean as one sample.
pub fn mc_randomized_value<P, B>(sampler: &(impl JointSampler + ?Sized), build: B, r: usize, outer: u64, inner: u64, seed: u64) -> Result<Estimate>
where
    P: Policy,
    B: Fn(u64) -> Result<P> + Sync + Send,
{
    let build_seed = rng::derive(seed, rng::tag::CONSTRUCTION);
    let draw_seed = rng::derive(seed, rng::tag::DRAW);
    let policy_seed = rng::derive(seed, rng::tag::POLICY);
    let dim = sampler.dim();
    let inner = inner.max(1);
    let out = par::map_reduce(
        outer,
        1,
        |range| -> Result<Moments> {
            let mut acc = Moments::default();
            let mut x: Vec<f64> = alloc::vec![0.0; dim];
            for o in range {
                let policy = build(rng::derive(build_seed, o))?;
                let mut block = 0.0;
                for k in 0..inner {
                    let index = o * inner + k;
                    sampler.draw(draw_seed, index, &mut x);
                    block += play(&policy, &x, r, rng::derive(policy_seed, index));
                }
                acc.push(block / inner as f64);
            }
            Ok(acc)
        },
        |a, b| Ok(a?.merge(b?)),
    );
    let m = out.unwrap_or(Ok(Moments::default()))?;
    Ok(Estimate { num_samples: m.count() * inner, ..Estimate::from_moments(&m) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generators::tower2;
    use crate::model::NaPermutation;
    use crate::policy::ThresholdPolicy;

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..100).map(|k| (k * k % 17) as f64).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean() - all.mean()).abs() < 1e-12);
        assert!((m.variance() - all.variance()).abs() < 1e-9);
    }

    #[test]
    fn constant_sampler_has_no_error() {
        let s = NaPermutation::new(alloc::vec![3.0]).unwrap();
        let e = mc_value(&s, &ThresholdPolicy::new(0.0), 1, 100, 1);
        assert_eq!((e.mean, e.std_error), (3.0, 0.0));
    }

    #[test]
    fn brackets_the_exact_value() {
        let t = tower2(2, 0.1).unwrap();
        let e = mc_value(&t, &ThresholdPolicy::new(5.0), 1, 200_000, 3);
        assert!(e.brackets(1.1, 4.0), "{e:?}");
        assert_eq!(e, mc_value(&t, &ThresholdPolicy::new(5.0), 1, 200_000, 3));
    }
}
