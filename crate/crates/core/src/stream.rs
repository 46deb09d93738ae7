//! Augmented streams `X_i = Z_i + W_i`: independent `Z_i` plus a
//! nonnegative bonus `W_i` chosen by an adversary that sees the realized
//! history `X_1..X_{i-1}` and the current `Z_i`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::DiscreteDistribution;
use crate::oracle::{mc_moments, Estimate};
use crate::policy::{play, top_r_sum, Policy};
use crate::rng;

/// Bonus rule `W_i = bonus(i, X_1..X_{i-1}, Z_i)`.
pub trait Adversary: Sync + Send + fmt::Debug {
    fn name(&self) -> String;

    fn bonus(&self, index: usize, history: &[f64], z: f64) -> f64;
}

/// Bonus that lifts `z` to the largest float not above `target`.
fn lift_to(z: f64, target: f64) -> f64 {
    if z >= target {
        return 0.0;
    }
    let mut w = target - z;
    while z + w > target {
        w = w.next_down();
    }
    w.max(0.0)
}

/// Bonus that lifts `z` to at least `target`.
fn lift_past(z: f64, target: f64) -> f64 {
    if z >= target {
        return 0.0;
    }
    let mut w = target - z;
    while z + w < target {
        w = w.next_up();
    }
    w
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroBonus;

impl Adversary for ZeroBonus {
    fn name(&self) -> String {
        "zero".into()
    }

    fn bonus(&self, _: usize, _: &[f64], _: f64) -> f64 {
        0.0
    }
}

/// `W_1 = δ`, nothing afterwards.
#[derive(Debug, Clone, Copy)]
pub struct TinyBoostFirst {
    pub delta: f64,
}

impl Adversary for TinyBoostFirst {
    fn name(&self) -> String {
        "tiny-boost-first".into()
    }

    fn bonus(&self, index: usize, _: &[f64], _: f64) -> f64 {
        if index == 0 {
            self.delta
        } else {
            0.0
        }
    }
}

/// Pushes every `X_i` with `Z_i < τ` to the largest float below `τ`.
#[derive(Debug, Clone, Copy)]
pub struct JustBelow {
    pub tau: f64,
}

impl Adversary for JustBelow {
    fn name(&self) -> String {
        "just-below".into()
    }

    fn bonus(&self, _: usize, _: &[f64], z: f64) -> f64 {
        if self.tau > 0.0 {
            lift_to(z, self.tau.next_down())
        } else {
            0.0
        }
    }
}

/// Lifts the first arrival just above `τ` so a threshold rule takes it.
#[derive(Debug, Clone, Copy)]
pub struct JustAboveFirst {
    pub tau: f64,
}

impl Adversary for JustAboveFirst {
    fn name(&self) -> String {
        "just-above-first".into()
    }

    fn bonus(&self, index: usize, _: &[f64], z: f64) -> f64 {
        if index == 0 {
            lift_past(z, self.tau.next_up())
        } else {
            0.0
        }
    }
}

/// Lures the first arrival to `τ/2`; once any past value reached `τ/2`,
/// lifts every later arrival to `τ`.
#[derive(Debug, Clone, Copy)]
pub struct HistoryTriggered {
    pub tau: f64,
}

impl Adversary for HistoryTriggered {
    fn name(&self) -> String {
        "history-triggered".into()
    }

    fn bonus(&self, index: usize, history: &[f64], z: f64) -> f64 {
        let half = self.tau / 2.0;
        if index == 0 {
            lift_to(z, half)
        } else if history.iter().any(|&x| x >= half) {
            lift_past(z, self.tau)
        } else {
            0.0
        }
    }
}

/// The shipped adversaries, tuned to threshold `tau`.
pub fn adversary_suite(tau: f64, delta: f64) -> Vec<Box<dyn Adversary>> {
    alloc::vec![
        Box::new(ZeroBonus),
        Box::new(TinyBoostFirst { delta }),
        Box::new(JustBelow { tau }),
        Box::new(JustAboveFirst { tau }),
        Box::new(HistoryTriggered { tau }),
    ]
}

pub struct AugmentedStream {
    z: Vec<DiscreteDistribution>,
    adversary: Box<dyn Adversary>,
}

impl fmt::Debug for AugmentedStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AugmentedStream").field("n", &self.z.len()).field("adversary", &self.adversary.name()).finish()
    }
}

impl AugmentedStream {
    pub fn new(z: Vec<DiscreteDistribution>, adversary: Box<dyn Adversary>) -> Self {
        Self { z, adversary }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z_dists(&self) -> &[DiscreteDistribution] {
        &self.z
    }

    pub fn adversary_name(&self) -> String {
        self.adversary.name()
    }

    /// Draws `Z` (trial `index`) and builds `X` arrival by arrival.
    pub fn realize(&self, seed: u64, index: u64, z: &mut [f64], x: &mut [f64]) -> Result<()> {
        let mut rng = rng::stream_rng(seed, index);
        for (zi, d) in z.iter_mut().zip(&self.z) {
            *zi = d.sample(rng.random::<f64>());
        }
        for i in 0..self.z.len() {
            let w = self.adversary.bonus(i, &x[..i], z[i]);
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::AdversaryViolation { index: i, bonus: w });
            }
            x[i] = z[i] + w;
        }
        Ok(())
    }
}

/// Paired estimates from one set of draws.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AugmentedReport {
    /// `E[ALG]`.
    pub alg: Estimate,
    /// `E[sum of the r largest Z_i]`.
    pub benchmark: Estimate,
    /// `E[ALG - benchmark / 2]`, paired per draw.
    pub gap: Estimate,
}

/// Runs `policy` on `samples` independent streams. Trial `k` realizes the
/// stream with `derive(seed, DRAW)` and index `k`.
pub fn run_augmented(stream: &AugmentedStream, policy: &(impl Policy + ?Sized), r: usize, samples: u64, seed: u64) -> Result<AugmentedReport> {
    let draw_seed = rng::derive(seed, rng::tag::DRAW);
    let policy_seed = rng::derive(seed, rng::tag::POLICY);
    let n = stream.len();
    let failure = core::sync::atomic::AtomicBool::new(false);
    let [alg, bench, gap] = mc_moments(samples, |k| {
        let mut z = alloc::vec![0.0; n];
        let mut x = alloc::vec![0.0; n];
        if stream.realize(draw_seed, k, &mut z, &mut x).is_err() {
            failure.store(true, core::sync::atomic::Ordering::Relaxed);
            return [0.0; 3];
        }
        let a = play(policy, &x, r, rng::derive(policy_seed, k));
        let b = top_r_sum(&z, r);
        [a, b, a - 0.5 * b]
    });
    if failure.load(core::sync::atomic::Ordering::Relaxed) {
        // replay sequentially to report the first violation
        let mut z = alloc::vec![0.0; n];
        let mut x = alloc::vec![0.0; n];
        for k in 0..samples {
            stream.realize(draw_seed, k, &mut z, &mut x)?;
        }
    }
    Ok(AugmentedReport { alg: Estimate::from_moments(&alg), benchmark: Estimate::from_moments(&bench), gap: Estimate::from_moments(&gap) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::ThresholdPolicy;

    #[derive(Debug)]
    struct Negative;

    impl Adversary for Negative {
        fn name(&self) -> String {
            "negative".into()
        }

        fn bonus(&self, _: usize, _: &[f64], _: f64) -> f64 {
            -1.0
        }
    }

    #[test]
    fn lifts_land_on_the_right_side() {
        for (z, t) in [(0.0, 0.1), (0.3, 0.7), (1e-9, 0.04758), (5.0, 2.0)] {
            assert!(z + lift_to(z, t) <= t.max(z));
            assert!(z + lift_past(z, t) >= t);
        }
        let below = JustBelow { tau: 0.7 };
        assert!(0.3 + below.bonus(3, &[], 0.3) < 0.7);
        assert_eq!(below.bonus(3, &[], 0.9), 0.0);
    }

    #[test]
    fn negative_bonus_is_rejected() {
        let s = AugmentedStream::new(alloc::vec![DiscreteDistribution::bernoulli(0.5).unwrap()], Box::new(Negative));
        let mut z = [0.0];
        let mut x = [0.0];
        assert!(matches!(s.realize(0, 0, &mut z, &mut x), Err(Error::AdversaryViolation { index: 0, .. })));
        assert!(run_augmented(&s, &ThresholdPolicy::new(0.0), 1, 10, 0).is_err());
    }

    #[test]
    fn history_trigger_fires_after_lure() {
        let a = HistoryTriggered { tau: 1.0 };
        assert_eq!(0.0 + a.bonus(0, &[], 0.0), 0.5);
        assert!(a.bonus(1, &[0.5], 0.0) >= 1.0);
        assert_eq!(a.bonus(1, &[0.2], 0.0), 0.0);
    }
}
