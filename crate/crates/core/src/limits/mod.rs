//! Convergence studies of quantum tomograms as `hbar -> 0`: the Planck
//! limit (fixed state family, tomograms collapse to delta distributions) and
//! the Ehrenfest limit (fixed energy, tomograms approach time-averaged
//! classical tomograms).

mod battery;
mod ehrenfest;
mod planck;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TomoError};
use crate::phase::Tomogram;

pub use battery::{standard_battery, TestFunction};
pub use ehrenfest::{ehrenfest_box, ehrenfest_cat, ehrenfest_coherent, ehrenfest_oscillator, oscillator_local_period};
pub use planck::{
    cat_interference_planck, interference_decay, planck_scaled_state, planck_scaled_tomogram, weak_delta_convergence, weak_error,
};

/// Smallest `R²` for which a log-log fit reports an exponent.
pub const FIT_R2_MIN: f64 = 0.98;

/// Default Ehrenfest level sequence.
pub const DEFAULT_N_VALUES: [usize; 5] = [25, 50, 100, 200, 400];

/// Largest normalization residual accepted for a study input.
pub const INPUT_MASS_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    NotConverged,
    Inconclusive,
}

/// Which limit a study takes. Planck studies hold the state family fixed;
/// Ehrenfest studies hold the energy fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Planck,
    Ehrenfest,
}

/// A named pass/fail check carried by a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < threshold`.
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value >= threshold,
        }
    }
}

/// Record of one convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub study: String,
    pub regime: Regime,
    /// Study inputs, enough to rerun it.
    pub parameters: serde_json::Value,
    /// `hbar` or `n`.
    pub parameter_name: String,
    pub values: Vec<f64>,
    pub distances: Vec<f64>,
    pub exponent: Option<f64>,
    pub r2: Option<f64>,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    /// Paths of per-point tomogram files, filled in by whoever writes them.
    pub artifacts: Vec<String>,
    /// Per-point diagnostics, one map per parameter value.
    pub details: Vec<BTreeMap<String, f64>>,
    /// Tomogram computed at each parameter value.
    #[serde(skip)]
    pub tomograms: Vec<Tomogram>,
}

impl LimitReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Least-squares line through `(ln x, ln y)`: `(slope, intercept, R²)`.
/// `None` when fewer than two points are given or any value is not positive.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, my - slope * mx, r2))
}

/// Exponent and `R²` of `distances ∝ values^exponent`; the exponent is
/// withheld when `R² < FIT_R2_MIN`.
pub(crate) fn fitted_exponent(values: &[f64], distances: &[f64]) -> (Option<f64>, Option<f64>) {
    match fit_power_law(values, distances) {
        Some((slope, _, r2)) if r2 >= FIT_R2_MIN => (Some(slope), Some(r2)),
        Some((_, _, r2)) => (None, Some(r2)),
        None => (None, None),
    }
}

/// Geometric sequence from `start` to `end` (both included) whose ratio is
/// the power of the endpoints' ratio closest to `1/2` (or `2`).
pub fn geometric_sequence(start: f64, end: f64) -> Result<Vec<f64>> {
    if !(start > 0.0) || !(end > 0.0) || !start.is_finite() || !end.is_finite() || start == end {
        return Err(TomoError::InvalidArgument(format!(
            "geometric sequence needs distinct positive end points, got {start} and {end}"
        )));
    }
    let steps = (start / end).log2().abs().round().max(1.0) as usize;
    let ratio = (end / start).powf(1.0 / steps as f64);
    let mut out: Vec<f64> = (0..steps).map(|k| start * ratio.powi(k as i32)).collect();
    out.push(end);
    Ok(out)
}

/// Checks that `values` has at least `min_len` entries and is strictly
/// monotone.
pub(crate) fn require_monotone(values: &[f64], min_len: usize, what: &str) -> Result<()> {
    if values.len() < min_len {
        return Err(TomoError::InvalidArgument(format!(
            "{what} needs at least {min_len} values, got {}",
            values.len()
        )));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(TomoError::InvalidArgument(format!(
            "{what} values must be strictly monotone, got {values:?}"
        )));
    }
    Ok(())
}

/// Checks for a positive geometric sequence (relative ratio spread `1e-6`).
pub(crate) fn require_geometric(values: &[f64], min_len: usize, what: &str) -> Result<()> {
    require_monotone(values, min_len, what)?;
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(TomoError::InvalidArgument(format!("{what} values must be positive")));
    }
    let r0 = values[1] / values[0];
    if values.windows(2).any(|w| ((w[1] / w[0]) / r0 - 1.0).abs() > 1e-6) {
        return Err(TomoError::InvalidArgument(format!(
            "{what} values must form a geometric sequence, got {values:?}"
        )));
    }
    Ok(())
}

/// Rejects a tomogram whose mass is off by more than [`INPUT_MASS_TOL`].
pub(crate) fn require_normalized(t: &Tomogram, label: &str) -> Result<f64> {
    let r = t.normalization_residual()?;
    if r >= INPUT_MASS_TOL {
        return Err(TomoError::Resolution(format!(
            "{label}: normalization residual {r:.3e} exceeds {INPUT_MASS_TOL:e}"
        )));
    }
    Ok(r)
}

pub(crate) fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
