use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::battery::TestFunction;
use super::{fitted_exponent, require_geometric, require_normalized, strictly_decreasing, Check, LimitReport, Regime, Verdict};
use crate::error::{Result, TomoError};
use crate::phase::metrics::kantorovich_norm;
use crate::phase::tomogram::trapezoid;
use crate::phase::{Tomogram, TomographyFrame, UniformGrid};
use crate::quantum::{
    cat_interference, cat_norm, cat_tomogram, state_tomogram, superposition_cross_term, superposition_tomogram, tomogram_from_wavefunction,
    CustomState, Parity, StateSpec,
};

/// Samples per largest resolving panel of a state's X window.
const SAMPLES_PER_PANEL: f64 = 4.0;

/// `ψ(x) = ħ^{γ/2} Ψ(ħ^γ (x - shift))` for a normalized profile `Ψ`,
/// `γ ∈ [-1, 0]`. The samples of `Ψ` are reused on the stretched grid, so
/// the norm is preserved exactly.
pub fn planck_scaled_state(profile: &CustomState, gamma: f64, shift: f64, hbar: f64) -> Result<StateSpec> {
    if !(-1.0..=0.0).contains(&gamma) {
        return Err(TomoError::InvalidArgument(format!("gamma must lie in [-1, 0], got {gamma}")));
    }
    if !(hbar > 0.0) {
        return Err(TomoError::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let s = hbar.powf(gamma);
    let g = profile.grid();
    let grid = UniformGrid::new(shift + g.min / s, shift + g.max / s, g.len())?;
    let psi = profile.samples().iter().map(|v| v * s.sqrt()).collect();
    StateSpec::custom(CustomState::new(grid, psi)?, hbar)
}

/// Tomogram of the scaled profile `ħ^{γ/2} Ψ(ħ^γ x)`.
pub fn planck_scaled_tomogram(
    profile: &CustomState,
    gamma: f64,
    hbar: f64,
    frame: TomographyFrame,
    x_grid: UniformGrid,
) -> Result<Tomogram> {
    tomogram_from_wavefunction(&planck_scaled_state(profile, gamma, 0.0, hbar)?, frame, x_grid)
}

/// `max_φ |∫ W φ dX - N Σ w_k φ(x_k)|` over the tests, for the target
/// `Σ w_k δ(X - x_k)` and the tomogram mass `N`.
pub fn weak_error(t: &Tomogram, tests: &[TestFunction], target: &[(f64, f64)]) -> f64 {
    let mass = t.mass();
    tests
        .iter()
        .map(|f| {
            let point: f64 = target.iter().map(|(w, x)| w * f.eval(*x)).sum();
            (t.integrate_against(|x| f.eval(x)) - mass * point).abs()
        })
        .fold(0.0, f64::max)
}

fn window_grid(state: &StateSpec, frame: TomographyFrame) -> Result<UniformGrid> {
    let w = state.frame_window(frame);
    UniformGrid::with_max_step(w.lo, w.hi, w.max_panel / SAMPLES_PER_PANEL)
}

/// Weak convergence of a state family to `δ(X - center)` as `hbar`
/// decreases along the family.
pub fn weak_delta_convergence(family: &[StateSpec], frame: TomographyFrame, tests: &[TestFunction], center: f64) -> Result<LimitReport> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    if tests.is_empty() {
        return Err(TomoError::InvalidArgument("no test functions given".into()));
    }
    let hbars: Vec<f64> = family.iter().map(|s| s.hbar).collect();
    require_geometric(&hbars, 4, "planck-delta hbar")?;
    if !strictly_decreasing(&hbars) {
        return Err(TomoError::InvalidArgument("planck-delta hbar values must decrease".into()));
    }
    let points = family
        .par_iter()
        .map(|state| -> Result<(Tomogram, BTreeMap<String, f64>)> {
            let t = state_tomogram(state, frame, window_grid(state, frame)?)?;
            let residual = require_normalized(&t, &state.descriptor())?;
            let (mean, var) = t.moments();
            let e = weak_error(&t, tests, &[(1.0, center)]);
            let details = BTreeMap::from([
                ("hbar".to_string(), state.hbar),
                ("normalization_residual".into(), residual),
                ("mean".into(), mean),
                ("variance".into(), var),
                ("weak_error".into(), e),
            ]);
            Ok((t, details))
        })
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<f64> = points.iter().map(|(_, d)| d["weak_error"]).collect();
    let (exponent, r2) = fitted_exponent(&hbars, &distances);
    let verdict = match exponent {
        _ if !strictly_decreasing(&distances) => Verdict::NotConverged,
        Some(e) if e > 0.0 => Verdict::Converged,
        Some(_) => Verdict::NotConverged,
        None => Verdict::Inconclusive,
    };
    let (tomograms, details) = points.into_iter().unzip();
    Ok(LimitReport {
        study: "planck-delta".into(),
        regime: Regime::Planck,
        parameters: json!({
            "family": family.iter().map(|s| s.descriptor()).collect::<Vec<_>>(),
            "frame": frame,
            "center": center,
            "tests": tests,
        }),
        parameter_name: "hbar".into(),
        values: hbars,
        distances,
        exponent,
        r2,
        verdict,
        checks: Vec::new(),
        artifacts: Vec::new(),
        details,
        tomograms,
    })
}

fn require_planck_hbars(hbars: &[f64], min_len: usize, study: &str) -> Result<()> {
    require_geometric(hbars, min_len, &format!("{study} hbar"))?;
    if hbars.iter().any(|h| !(1e-4 * (1.0 - 1e-9)..=1e-1 * (1.0 + 1e-9)).contains(h)) {
        return Err(TomoError::InvalidArgument(format!(
            "{study} hbar values must lie in [1e-4, 1e-1], got {hbars:?}"
        )));
    }
    Ok(())
}

/// Decay of the interference term of `(φ_n + φ_m)/√2` as `hbar -> 0`.
///
/// The distance is the dual-Lipschitz norm of the signed cross term
/// `Re(A_n A_m*)/(2πħ|nu|)`, which measures its weak size. The plain
/// `∫ |cross| dX` is recorded per point as `abs_integral`; it does not
/// depend on `hbar`.
pub fn interference_decay(n: usize, m: usize, frame: TomographyFrame, hbar_values: &[f64]) -> Result<LimitReport> {
    if n == m {
        return Err(TomoError::InvalidArgument(format!("interference needs n != m, got n = m = {n}")));
    }
    if frame.nu == 0.0 {
        return Err(TomoError::InvalidArgument("interference decay needs nu != 0".into()));
    }
    require_planck_hbars(hbar_values, 5, "interference")?;
    let q_half = (2.0 * n.max(m) as f64 + 1.0).sqrt() + 10.0;
    let points = hbar_values
        .par_iter()
        .map(|&hbar| -> Result<(Tomogram, BTreeMap<String, f64>)> {
            let x_scale = (hbar * (frame.mu * frame.mu + frame.nu * frame.nu)).sqrt();
            let grid = UniformGrid::symmetric(q_half * x_scale, 2001)?;
            let cross = grid
                .points()
                .into_iter()
                .map(|x| superposition_cross_term(n, m, frame, x, hbar, 1.0))
                .collect::<Result<Vec<_>>>()?;
            let t = Tomogram::from_fn(frame, grid, |x| {
                superposition_tomogram(n, m, frame, x, hbar, 1.0).unwrap_or(f64::NAN)
            })?;
            let residual = require_normalized(&t, "superposition")?;
            let h = grid.step();
            let abs: Vec<f64> = cross.iter().map(|v| v.abs()).collect();
            let details = BTreeMap::from([
                ("hbar".to_string(), hbar),
                ("normalization_residual".into(), residual),
                ("signed_integral".into(), trapezoid(&cross, h)),
                ("abs_integral".into(), trapezoid(&abs, h)),
                ("kantorovich_norm".into(), kantorovich_norm(&cross, h)),
            ]);
            Ok((t, details))
        })
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<f64> = points.iter().map(|(_, d)| d["kantorovich_norm"]).collect();
    let (exponent, r2) = fitted_exponent(hbar_values, &distances);
    let signed = points.iter().map(|(_, d)| d["signed_integral"].abs()).fold(0.0, f64::max);
    let checks = vec![
        Check::below("signed_integral", signed, 1e-6),
        Check::below("exponent_deviation", exponent.map_or(f64::INFINITY, |e| (e - 0.5).abs()), 0.03),
    ];
    let verdict = match exponent {
        Some(e) if e > 0.0 && strictly_decreasing(&distances) => Verdict::Converged,
        Some(_) => Verdict::NotConverged,
        None => Verdict::Inconclusive,
    };
    let (tomograms, details) = points.into_iter().unzip();
    Ok(LimitReport {
        study: "interference".into(),
        regime: Regime::Planck,
        parameters: json!({ "n": n, "m": m, "frame": frame, "hbars": hbar_values }),
        parameter_name: "hbar".into(),
        values: hbar_values.to_vec(),
        distances,
        exponent,
        r2,
        verdict,
        checks,
        artifacts: Vec::new(),
        details,
        tomograms,
    })
}

/// Planck limit of the even and odd cat states at fixed `alpha`: the
/// interference integral `∫ I dX = 2e^{-2|α|²}` at every `hbar`, unit mass,
/// and weak convergence of the even cat to `δ(X)`.
pub fn cat_interference_planck(
    alpha: Complex64,
    frame: TomographyFrame,
    hbar_values: &[f64],
    tests: &[TestFunction],
) -> Result<LimitReport> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    require_geometric(hbar_values, 3, "cat-interference hbar")?;
    let expected = 2.0 * (-2.0 * alpha.norm_sqr()).exp();
    let points = hbar_values
        .par_iter()
        .map(|&hbar| -> Result<(Tomogram, BTreeMap<String, f64>)> {
            let state = StateSpec::cat(alpha, Parity::Even, hbar)?;
            let grid = window_grid(&state, frame)?;
            let h = grid.step();
            let xs = grid.points();
            let inter = xs
                .iter()
                .map(|&x| cat_interference(alpha, frame, x, hbar, 1.0))
                .collect::<Result<Vec<_>>>()?;
            let even = state_tomogram(&state, frame, grid)?;
            let residual = require_normalized(&even, "even cat")?;
            let mut details = BTreeMap::from([
                ("hbar".to_string(), hbar),
                ("interference_integral".into(), trapezoid(&inter, h)),
                ("normalization_residual".into(), residual),
                ("weak_error".into(), weak_error(&even, tests, &[(1.0, 0.0)])),
            ]);
            if alpha.norm() > 0.0 {
                let odd: Vec<f64> = xs
                    .iter()
                    .map(|&x| cat_tomogram(alpha, Parity::Odd, frame, x, hbar, 1.0))
                    .collect::<Result<_>>()?;
                details.insert("odd_normalization_residual".into(), (trapezoid(&odd, h) - 1.0).abs());
            }
            Ok((even, details))
        })
        .collect::<Result<Vec<_>>>()?;
    let deviation = points
        .iter()
        .map(|(_, d)| (d["interference_integral"] - expected).abs())
        .fold(0.0, f64::max);
    let mass = points
        .iter()
        .flat_map(|(_, d)| {
            [
                d["normalization_residual"],
                d.get("odd_normalization_residual").copied().unwrap_or(0.0),
            ]
        })
        .fold(0.0, f64::max);
    let coefficient = |p: Parity| {
        let s = if p == Parity::Even { 1.0 } else { -1.0 };
        cat_norm(alpha, p).powi(2) * (2.0 + s * expected)
    };
    let mut coeff_dev = (coefficient(Parity::Even) - 1.0).abs();
    if alpha.norm() > 0.0 {
        coeff_dev = coeff_dev.max((coefficient(Parity::Odd) - 1.0).abs());
    }
    let distances: Vec<f64> = points.iter().map(|(_, d)| d["weak_error"]).collect();
    let (exponent, r2) = fitted_exponent(hbar_values, &distances);
    let checks = vec![
        Check::below("interference_integral_deviation", deviation, 1e-6),
        Check::below("normalization_residual", mass, 1e-6),
        Check::below("limit_coefficient_deviation", coeff_dev, 1e-12),
    ];
    let verdict = if !checks.iter().all(|c| c.passed) || !strictly_decreasing(&distances) {
        Verdict::NotConverged
    } else if exponent.is_some_and(|e| e > 0.0) {
        Verdict::Converged
    } else {
        Verdict::Inconclusive
    };
    let (tomograms, details) = points.into_iter().unzip();
    Ok(LimitReport {
        study: "cat-interference".into(),
        regime: Regime::Planck,
        parameters: json!({
            "alpha": [alpha.re, alpha.im],
            "frame": frame,
            "hbars": hbar_values,
            "expected_integral": expected,
        }),
        parameter_name: "hbar".into(),
        values: hbar_values.to_vec(),
        distances,
        exponent,
        r2,
        verdict,
        checks,
        artifacts: Vec::new(),
        details,
        tomograms,
    })
}
