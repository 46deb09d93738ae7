use alloc::vec::Vec;

use super::{Estimate, OracleConfig};
use crate::error::{Error, Result};
use crate::model::LinearInstance;
use crate::par;
use crate::policy::{play, top_r_sum, Policy};

const CHUNK: u64 = 4096;

fn check_cap(instance: &LinearInstance, cap: u64) -> Result<u64> {
    let size = instance.joint_support_size();
    if size > cap as u128 {
        return Err(Error::SupportTooLarge { size, cap });
    }
    Ok(size as u64)
}

/// Folds `step(acc, y, x, prob)` over every scenario of the joint support.
/// Scenarios are visited in lexicographic order of feature atom indices
/// (last feature fastest); chunk partials are merged in that order.
pub(crate) fn fold_scenarios<T, I, S, M>(instance: &LinearInstance, cap: u64, init: I, step: S, merge: M) -> Result<(T, u64)>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    S: Fn(&mut T, &[f64], &[f64], f64) + Sync + Send,
    M: FnMut(T, T) -> T,
{
    let total = check_cap(instance, cap)?;
    let m = instance.m();
    let n = instance.n();
    let lens: Vec<usize> = instance.features().iter().map(|d| d.len()).collect();
    let out = par::map_reduce(
        total,
        CHUNK,
        |range| {
            let mut acc = init();
            let mut digits = alloc::vec![0usize; m];
            let mut rest = range.start;
            for j in (0..m).rev() {
                digits[j] = (rest % lens[j] as u64) as usize;
                rest /= lens[j] as u64;
            }
            let mut y = alloc::vec![0.0; m];
            let mut x = alloc::vec![0.0; n];
            for _ in range {
                let mut p = 1.0;
                for j in 0..m {
                    let (v, q) = instance.feature(j).atoms()[digits[j]];
                    y[j] = v;
                    p *= q;
                }
                instance.apply(&y, &mut x);
                step(&mut acc, &y, &x, p);
                for j in (0..m).rev() {
                    digits[j] += 1;
                    if digits[j] < lens[j] {
                        break;
                    }
                    digits[j] = 0;
                }
            }
            acc
        },
        merge,
    );
    Ok((out.unwrap_or_else(init), total))
}

/// Fully materialized joint support: `y`, `x` and probability per scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTable {
    n: usize,
    m: usize,
    ys: Vec<f64>,
    xs: Vec<f64>,
    probs: Vec<f64>,
}

impl ScenarioTable {
    pub fn build(instance: &LinearInstance, cap: u64) -> Result<Self> {
        let (parts, _) = fold_scenarios(
            instance,
            cap,
            || (Vec::new(), Vec::new(), Vec::new()),
            |acc: &mut (Vec<f64>, Vec<f64>, Vec<f64>), y, x, p| {
                acc.0.extend_from_slice(y);
                acc.1.extend_from_slice(x);
                acc.2.push(p);
            },
            |mut a, b| {
                a.0.extend(b.0);
                a.1.extend(b.1);
                a.2.extend(b.2);
                a
            },
        )?;
        Ok(Self { n: instance.n(), m: instance.m(), ys: parts.0, xs: parts.1, probs: parts.2 })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn y(&self, k: usize) -> &[f64] {
        &self.ys[k * self.m..(k + 1) * self.m]
    }

    pub fn x(&self, k: usize) -> &[f64] {
        &self.xs[k * self.n..(k + 1) * self.n]
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k]
    }

    pub fn total_probability(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// `E[sum of the r largest X_i]`; `r = 1` is `E[max_i X_i]`.
pub fn exact_prophet_value(instance: &LinearInstance, r: usize, cfg: &OracleConfig) -> Result<Estimate> {
    let (v, total) = fold_scenarios(instance, cfg.enumeration_cap, || 0.0, |acc, _, x, p| *acc += p * top_r_sum(x, r), |a, b| a + b)?;
    Ok(Estimate::exact(v, total))
}

/// Exact `E[ALG]` of a policy replayed with `cfg.seed` on every scenario.
pub fn exact_policy_value(instance: &LinearInstance, policy: &(impl Policy + ?Sized), r: usize, cfg: &OracleConfig) -> Result<Estimate> {
    let (v, total) =
        fold_scenarios(instance, cfg.enumeration_cap, || 0.0, |acc, _, x, p| *acc += p * play(policy, x, r, cfg.seed), |a, b| a + b)?;
    Ok(Estimate::exact(v, total))
}

/// Exact value of a randomized policy given as a finite mixture of
/// deterministic components `(weight, policy)`.
pub fn exact_mixture_value(instance: &LinearInstance, components: &[(f64, &dyn Policy)], r: usize, cfg: &OracleConfig) -> Result<Estimate> {
    let (v, total) = fold_scenarios(
        instance,
        cfg.enumeration_cap,
        || 0.0,
        |acc, _, x, p| {
            let mut inner = 0.0;
            for (w, policy) in components {
                inner += w * play(*policy, x, r, cfg.seed);
            }
            *acc += p * inner;
        },
        |a, b| a + b,
    )?;
    Ok(Estimate::exact(v, total))
}

/// Exact value of every fixed threshold `τ ∈ candidates`. The value is
/// constant on each interval `(c_{k-1}, c_k]` between consecutive
/// achievable values, so these candidates cover every threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub candidates: Vec<f64>,
    pub values: Vec<f64>,
}

impl ThresholdCurve {
    /// Smallest maximizing threshold and its value.
    pub fn best(&self) -> (f64, f64) {
        let mut best = (self.candidates[0], self.values[0]);
        for (&t, &v) in self.candidates.iter().zip(&self.values) {
            if v > best.1 {
                best = (t, v);
            }
        }
        best
    }

    /// Value of threshold `tau` (any real).
    pub fn value_at(&self, tau: f64) -> f64 {
        let k = self.candidates.partition_point(|&c| c < tau);
        self.values.get(k).copied().unwrap_or(0.0)
    }
}

/// Exact single-item value of every take-on-`>=` threshold, via one sweep
/// over prefix-maximum records per scenario.
pub fn threshold_curve(instance: &LinearInstance, cfg: &OracleConfig) -> Result<ThresholdCurve> {
    let (mut cands, _) = fold_scenarios(
        instance,
        cfg.enumeration_cap,
        Vec::new,
        |acc: &mut Vec<f64>, _, x, _| acc.extend_from_slice(x),
        |mut a, b| {
            a.extend(b);
            a.sort_by(f64::total_cmp);
            a.dedup();
            a
        },
    )?;
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let top = cands.last().copied().unwrap_or(0.0);
    cands.push(top.next_up());

    let k = cands.len();
    let (diff, _) = fold_scenarios(
        instance,
        cfg.enumeration_cap,
        || alloc::vec![0.0; k + 1],
        |acc: &mut Vec<f64>, _, x, p| {
            let mut record = f64::NEG_INFINITY;
            for &v in x {
                if v > record {
                    // thresholds in (record, v] stop here
                    let lo = cands.partition_point(|&c| c <= record);
                    let hi = cands.partition_point(|&c| c < v);
                    acc[lo] += p * v;
                    acc[hi + 1] -= p * v;
                    record = v;
                }
            }
        },
        |mut a, b| {
            for (s, t) in a.iter_mut().zip(&b) {
                *s += t;
            }
            a
        },
    )?;
    let mut values = Vec::with_capacity(k);
    let mut run = 0.0;
    for d in &diff[..k] {
        run += d;
        values.push(run.max(0.0));
    }
    // past every achievable value; the running sum only holds rounding residue
    values[k - 1] = 0.0;
    Ok(ThresholdCurve { candidates: cands, values })
}

/// Best single-item fixed threshold and its exact value.
pub fn best_fixed_threshold(instance: &LinearInstance, cfg: &OracleConfig) -> Result<(f64, Estimate)> {
    let curve = threshold_curve(instance, cfg)?;
    let (tau, v) = curve.best();
    Ok((tau, Estimate::exact(v, instance.joint_support_size() as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generators::tower2;
    use crate::model::DiscreteDistribution;
    use crate::policy::ThresholdPolicy;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn two_tower_values() {
        let cfg = OracleConfig::default();
        let t = tower2(2, 0.1).unwrap();
        assert!(close(exact_prophet_value(&t, 1, &cfg).unwrap().mean, 1.99));
        assert!(close(exact_policy_value(&t, &ThresholdPolicy::new(5.0), 1, &cfg).unwrap().mean, 1.1));
        assert!(close(exact_policy_value(&t, &ThresholdPolicy::new(50.0), 1, &cfg).unwrap().mean, 1.0));
        let curve = threshold_curve(&t, &cfg).unwrap();
        assert!(close(curve.value_at(5.0), 1.1));
        assert!(close(curve.value_at(15.0), 0.92));
        assert!(close(curve.value_at(50.0), 1.0));
        assert_eq!(curve.value_at(1e9), 0.0);
        let (_, best) = best_fixed_threshold(&t, &cfg).unwrap();
        assert!(close(best.mean, 1.1));
    }

    #[test]
    fn curve_matches_direct_evaluation() {
        let cfg = OracleConfig::default();
        let t = tower2(3, 0.2).unwrap();
        let curve = threshold_curve(&t, &cfg).unwrap();
        for &tau in &curve.candidates {
            let direct = exact_policy_value(&t, &ThresholdPolicy::new(tau), 1, &cfg).unwrap().mean;
            assert!((direct - curve.value_at(tau)).abs() < 1e-12, "tau {tau}");
        }
    }

    #[test]
    fn table_covers_support() {
        let t = tower2(3, 0.1).unwrap();
        let table = ScenarioTable::build(&t, 1 << 10).unwrap();
        assert_eq!(table.len(), 8);
        assert!((table.total_probability() - 1.0).abs() < 1e-12);
        assert!(ScenarioTable::build(&t, 4).is_err());
    }

    #[test]
    fn full_budget_is_linear() {
        let cfg = OracleConfig::default();
        let f = alloc::vec![DiscreteDistribution::new(alloc::vec![(0.0, 0.5), (2.0, 0.5)]).unwrap(); 2];
        let inst = LinearInstance::new(3, 2, alloc::vec![(0, 0, 1.0), (1, 0, 0.5), (1, 1, 2.0), (2, 1, 1.0)], f).unwrap();
        let v = exact_prophet_value(&inst, 3, &cfg).unwrap().mean;
        assert!((v - (1.5 * 1.0 + 3.0 * 1.0)).abs() < 1e-12);
    }
}
