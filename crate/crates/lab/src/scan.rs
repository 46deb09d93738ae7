//! Threshold scans: value of the fixed rule "take the first `X_i >= tau`".

use anyhow::Result;
use prophet_core::oracle::{mc_value, threshold_curve, OracleConfig};
use prophet_core::{LinearInstance, ThresholdPolicy};

use crate::experiment::OracleMode;
use crate::formats::{fmt_num, Table};

#[derive(Debug, Clone, PartialEq)]
pub enum ScanPoints {
    /// Every threshold where the value can change: the achievable values of
    /// any `X_i`, plus one point past the largest.
    Achievable,
    Grid(Vec<f64>),
}

/// One row per threshold: `tau, value, std_error, exact`. The exact path
/// needs the joint support to fit `cfg.enumeration_cap`.
pub fn scan_thresholds(instance: &LinearInstance, points: &ScanPoints, mode: OracleMode, samples: u64, seed: u64) -> Result<Table> {
    let cfg = OracleConfig { mc_samples: samples, seed, ..OracleConfig::default() };
    let exact = match mode {
        OracleMode::Exact => true,
        OracleMode::Mc => false,
        OracleMode::Auto => instance.joint_support_size() <= cfg.enumeration_cap as u128,
    };
    let mut t = Table::new(&["tau", "value", "std_error", "exact"]);
    if exact {
        let curve = threshold_curve(instance, &cfg)?;
        let taus: Vec<f64> = match points {
            ScanPoints::Achievable => curve.candidates.clone(),
            ScanPoints::Grid(g) => g.clone(),
        };
        for tau in taus {
            t.push(vec![fmt_num(tau), fmt_num(curve.value_at(tau)), fmt_num(0.0), "true".into()]);
        }
    } else {
        let taus = match points {
            ScanPoints::Grid(g) => g.clone(),
            ScanPoints::Achievable => anyhow::bail!("the achievable set needs the exact oracle; pass a grid for Monte Carlo scans"),
        };
        for tau in taus {
            let e = mc_value(instance, &ThresholdPolicy::new(tau), 1, samples, seed);
            t.push(vec![fmt_num(tau), fmt_num(e.mean), fmt_num(e.std_error), "false".into()]);
        }
    }
    Ok(t)
}
