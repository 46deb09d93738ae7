//! Exact desk-scale oracles and seeded Monte Carlo estimators.
//!
//! Exact quantities enumerate the full joint support of `Y` in fixed-size
//! chunks and merge partial sums in chunk order, so the reported numbers do
//! not depend on the thread schedule.

mod enumerate;
mod mc;
mod online;

pub use enumerate::{
    best_fixed_threshold, exact_mixture_value, exact_policy_value, exact_prophet_value, threshold_curve, ScenarioTable,
    ThresholdCurve,
};
pub use mc::{mc_moments, mc_prophet_value, mc_randomized_value, mc_value, Moments};
pub use online::{brute_force_online_optimum, exact_online_optimum, obs_key};

pub(crate) use enumerate::fold_scenarios;

/// Point estimate with its standard error. Exact values have zero error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    #[cfg_attr(feature = "serde", serde(rename = "n"))]
    pub num_samples: u64,
    pub exact: bool,
}

impl Estimate {
    pub fn exact(mean: f64, scenarios: u64) -> Self {
        Self { mean, std_error: 0.0, num_samples: scenarios, exact: true }
    }

    pub fn from_moments(m: &Moments) -> Self {
        Self { mean: m.mean(), std_error: m.std_error(), num_samples: m.count(), exact: false }
    }

    /// `mean ± k·std_error` contains `value`.
    pub fn brackets(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }

    pub fn scaled(self, c: f64) -> Self {
        Self { mean: self.mean * c, std_error: self.std_error * c.abs(), ..self }
    }
}

/// Caps and sampling budgets for the oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleConfig {
    /// Largest joint support enumerated for prophet and policy values.
    pub enumeration_cap: u64,
    /// Largest joint support handed to the online-optimum recursion.
    pub dp_cap: u64,
    /// Monte Carlo samples used when a quantity is not enumerable.
    pub mc_samples: u64,
    pub seed: u64,
    /// Step budget of the brute-force policy search.
    pub brute_force_steps: u64,
    /// Largest support kept when convolving features into one variable.
    pub convolution_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enumeration_cap: 1 << 20,
            dp_cap: 1 << 16,
            mc_samples: 100_000,
            seed: 0,
            brute_force_steps: 1 << 26,
            convolution_cap: 1 << 14,
        }
    }
}
