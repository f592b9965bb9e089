use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::battery::TestFunction;
use super::planck::weak_error;
use super::{
    fitted_exponent, require_geometric, require_monotone, require_normalized, strictly_decreasing, Check, LimitReport, Regime, Verdict,
};
use crate::classical::{classical_box_tomogram_grid, classical_oscillator_tomogram};
use crate::error::{Result, TomoError};
use crate::phase::metrics::{l1_masked, local_average};
use crate::phase::{Tomogram, TomographyFrame, UniformGrid};
use crate::quantum::{
    box_tomogram, box_tomogram_stationary_phase, box_unit_energy_hbar, cat_interference_phase, hermite_tomogram, state_tomogram, Parity,
    StateSpec,
};
use crate::special::{log_gamma, parabolic_u_asymptotic_parts};

fn require_decreasing_hbars(hbars: &[f64], study: &str) -> Result<()> {
    require_geometric(hbars, 3, &format!("{study} hbar"))?;
    if !strictly_decreasing(hbars) {
        return Err(TomoError::InvalidArgument(format!("{study} hbar values must decrease")));
    }
    Ok(())
}

/// `α = (q + ip)/√(2ħ)`, which keeps the phase-space centre at `(q, p)`.
fn constrained_alpha(q: f64, p: f64, hbar: f64) -> Complex64 {
    Complex64::new(q, p) / (2.0 * hbar).sqrt()
}

/// Coherent states with `α√(2ħ) = q + ip` held fixed. The tomogram is a
/// Gaussian at `mu q + nu p` of variance `ħ(mu² + nu²)/2`; it converges
/// weakly to the classical atom there.
pub fn ehrenfest_coherent(q: f64, p: f64, frame: TomographyFrame, hbar_values: &[f64], tests: &[TestFunction]) -> Result<LimitReport> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    require_decreasing_hbars(hbar_values, "ehrenfest-coherent")?;
    let centre = frame.project(q, p);
    let points = hbar_values
        .par_iter()
        .map(|&hbar| -> Result<(Tomogram, BTreeMap<String, f64>)> {
            let sigma = (0.5 * hbar * (frame.mu * frame.mu + frame.nu * frame.nu)).sqrt();
            let grid = UniformGrid::new(centre - 12.0 * sigma, centre + 12.0 * sigma, 2001)?;
            let t = state_tomogram(&StateSpec::coherent(constrained_alpha(q, p, hbar), hbar)?, frame, grid)?;
            let residual = require_normalized(&t, "coherent")?;
            let peak = t.argmax().unwrap_or(f64::NAN);
            let width = t.moments().1.sqrt();
            let details = BTreeMap::from([
                ("hbar".to_string(), hbar),
                ("normalization_residual".into(), residual),
                ("peak".into(), peak),
                ("peak_error_cells".into(), (peak - centre).abs() / grid.step()),
                ("cell".into(), grid.step()),
                ("width".into(), width),
                ("expected_width".into(), sigma),
                ("weak_error".into(), weak_error(&t, tests, &[(1.0, centre)])),
            ]);
            Ok((t, details))
        })
        .collect::<Result<Vec<_>>>()?;
    let column = |k: &str| -> Vec<f64> { points.iter().map(|(_, d)| d[k]).collect() };
    let widths = column("width");
    let width_dev = points
        .iter()
        .map(|(_, d)| (d["width"] / d["expected_width"] - 1.0).abs())
        .fold(0.0, f64::max);
    let width_exp = fitted_exponent(hbar_values, &widths).0;
    let checks = vec![
        Check::below("peak_error_cells", column("peak_error_cells").into_iter().fold(0.0, f64::max), 1.0),
        Check::below("width_relative_deviation", width_dev, 1e-3),
        Check::below(
            "width_exponent_deviation",
            width_exp.map_or(f64::INFINITY, |e| (e - 0.5).abs()),
            0.01,
        ),
    ];
    let distances = column("weak_error");
    finish(
        "ehrenfest-coherent",
        json!({ "q": q, "p": p, "frame": frame, "hbars": hbar_values, "tests": tests }),
        hbar_values,
        distances,
        checks,
        points,
        |_| true,
    )
}

/// Number of sign changes of `cos φ` over `[-half, half]`, sampled finely
/// enough to see every fringe of the phase `φ`.
fn count_sign_changes(phase: impl Fn(f64) -> Result<f64>, half: f64, slope: f64) -> Result<usize> {
    let period = if slope > 0.0 { 2.0 * PI / slope } else { f64::INFINITY };
    let grid = UniformGrid::with_max_step(-half, half, (period / 32.0).min(half / 1000.0))?;
    let signs = grid
        .points()
        .into_iter()
        .map(|x| phase(x).map(|v| v.cos() >= 0.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(signs.windows(2).filter(|w| w[0] != w[1]).count())
}

/// `N_±² = 1/(2(1 ± e^{-2|α|²}))`, formed without a square root so that it
/// rounds to `½` exactly once the overlap underflows.
fn cat_norm_sqr(alpha: Complex64, parity: Parity) -> f64 {
    let s = if parity == Parity::Even { 1.0 } else { -1.0 };
    0.5 / (1.0 + s * (-2.0 * alpha.norm_sqr()).exp())
}

/// Even cat states with `α√(2ħ) = q + ip` held fixed: the fringe count of
/// the interference term over a fixed window grows like `1/ħ`, `N_±² -> ½`
/// and the tomogram converges weakly to `½δ(X - X₀) + ½δ(X + X₀)`,
/// `X₀ = mu q + nu p`.
pub fn ehrenfest_cat(q: f64, p: f64, frame: TomographyFrame, hbar_values: &[f64], tests: &[TestFunction]) -> Result<LimitReport> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    if q == 0.0 && p == 0.0 {
        return Err(TomoError::InvalidArgument("ehrenfest-cat needs (q, p) != (0, 0)".into()));
    }
    require_decreasing_hbars(hbar_values, "ehrenfest-cat")?;
    let x0 = frame.project(q, p);
    let s2 = frame.mu * frame.mu + frame.nu * frame.nu;
    let half_window = s2.sqrt() * q.hypot(p);
    let points = hbar_values
        .par_iter()
        .map(|&hbar| -> Result<(Tomogram, BTreeMap<String, f64>)> {
            let alpha = constrained_alpha(q, p, hbar);
            let sigma = (0.5 * hbar * s2).sqrt();
            // fringe phase slope 2√2 κ Re(α u) in X
            let u = Complex64::new(frame.nu, frame.mu) / s2.sqrt();
            let slope = (2.0 * SQRT_2 * (alpha * u).re / (hbar * s2).sqrt()).abs();
            let fringe = if slope > 0.0 { 2.0 * PI / slope } else { f64::INFINITY };
            let reach = x0.abs() + 12.0 * sigma;
            let grid = UniformGrid::with_max_step(-reach, reach, (sigma / 8.0).min(fringe / 16.0))?;
            let t = state_tomogram(&StateSpec::cat(alpha, Parity::Even, hbar)?, frame, grid)?;
            let residual = require_normalized(&t, "cat")?;
            let crossings = count_sign_changes(|x| cat_interference_phase(alpha, frame, x, hbar, 1.0), half_window, slope)?;
            let mut details = BTreeMap::from([
                ("hbar".to_string(), hbar),
                ("normalization_residual".into(), residual),
                ("zero_crossings".into(), crossings as f64),
                ("n2_even".into(), cat_norm_sqr(alpha, Parity::Even)),
                ("n2_odd".into(), cat_norm_sqr(alpha, Parity::Odd)),
                ("weak_error".into(), weak_error(&t, tests, &[(0.5, x0), (0.5, -x0)])),
            ]);
            if x0.abs() > 8.0 * sigma {
                let (lo, hi) = (t.mass_in(-reach, 0.0), t.mass_in(0.0, reach));
                let (minus, plus) = if x0 > 0.0 { (lo, hi) } else { (hi, lo) };
                details.insert("mass_plus".into(), plus);
                details.insert("mass_minus".into(), minus);
            }
            Ok((t, details))
        })
        .collect::<Result<Vec<_>>>()?;
    let n2_dev = points
        .iter()
        .map(|(_, d)| (d["n2_even"] - 0.5).abs().max((d["n2_odd"] - 0.5).abs()))
        .fold(0.0, f64::max);
    let mut checks = vec![Check::below("n2_deviation", n2_dev, 1e-3)];
    if points.iter().all(|(_, d)| d.contains_key("mass_plus")) {
        let dev = points
            .iter()
            .map(|(_, d)| (d["mass_plus"] - 0.5).abs().max((d["mass_minus"] - 0.5).abs()))
            .fold(0.0, f64::max);
        checks.push(Check::below("endpoint_mass_deviation", dev, 1e-3));
    }
    let ratio_dev = points
        .windows(2)
        .zip(hbar_values.windows(2))
        .map(|(w, h)| {
            let got = w[1].1["zero_crossings"] / w[0].1["zero_crossings"];
            (got / (h[0] / h[1]) - 1.0).abs()
        })
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    checks.push(Check::below("crossing_ratio_deviation", ratio_dev, 0.1));
    let distances: Vec<f64> = points.iter().map(|(_, d)| d["weak_error"]).collect();
    finish(
        "ehrenfest-cat",
        json!({ "q": q, "p": p, "frame": frame, "hbars": hbar_values, "tests": tests, "crossing_window": half_window }),
        hbar_values,
        distances,
        checks,
        points,
        |_| true,
    )
}

/// Box of length `L` at unit energy, `ħ = √2 L/(nπ)`. For each level and
/// frame the stationary-phase tomogram is averaged over one beat period
/// `|mu| L/n` and compared in L¹ with the classical tomogram, two grid cells
/// around each support edge excluded. The position marginal of the largest
/// level is compared with the plateau `1/L`, and the largest level's
/// quadrature tomogram at `(0.02, 1)` is checked for mass near `X = ±√2`.
pub fn ehrenfest_box(length: f64, n_values: &[usize], frames: &[TomographyFrame]) -> Result<LimitReport> {
    if !(length > 0.0) {
        return Err(TomoError::InvalidArgument(format!("box length must be positive, got {length}")));
    }
    let ns: Vec<f64> = n_values.iter().map(|n| *n as f64).collect();
    require_monotone(&ns, 2, "ehrenfest-box n")?;
    if ns.windows(2).any(|w| w[1] < w[0]) || n_values[0] < 10 {
        return Err(TomoError::InvalidArgument(format!(
            "ehrenfest-box needs increasing n >= 10, got {n_values:?}"
        )));
    }
    if frames.is_empty() || frames.iter().any(|f| f.mu == 0.0 || f.nu == 0.0) {
        return Err(TomoError::InvalidArgument(
            "ehrenfest-box needs frames with mu != 0 and nu != 0".into(),
        ));
    }
    let points = n_values
        .par_iter()
        .map(|&n| -> Result<(Tomogram, BTreeMap<String, f64>)> {
            let mut details = BTreeMap::from([("n".to_string(), n as f64), ("hbar".into(), box_unit_energy_hbar(n, length))]);
            let mut first = None;
            let mut worst: f64 = 0.0;
            for (k, &frame) in frames.iter().enumerate() {
                let (t, d, raw) = box_frame_distance(n, length, frame)?;
                details.insert(format!("l1_frame{k}"), d);
                details.insert(format!("stationary_phase_mass_error_frame{k}"), raw);
                details.insert(
                    format!("normalization_residual_frame{k}"),
                    require_normalized(&t, "stationary-phase box")?,
                );
                worst = worst.max(d);
                first.get_or_insert(t);
            }
            details.insert("l1".into(), worst);
            Ok((first.expect("at least one frame"), details))
        })
        .collect::<Result<Vec<_>>>()?;
    let n_top = *n_values.last().unwrap();
    let plateau = box_position_plateau(n_top, length)?;
    let concentration = box_momentum_concentration(n_top, length)?;
    let checks = vec![
        Check::below("final_l1", points.last().unwrap().1["l1"], 0.05),
        Check::below("position_plateau_l1", plateau, 0.01),
        Check::at_least("momentum_concentration", concentration, 0.9),
    ];
    let distances: Vec<f64> = points.iter().map(|(_, d)| d["l1"]).collect();
    finish(
        "ehrenfest-box",
        json!({ "L": length, "ns": n_values, "frames": frames, "momentum_frame": TomographyFrame::new(0.02, 1.0) }),
        &ns,
        distances,
        checks,
        points,
        strictly_decreasing,
    )
}

/// Stationary-phase tomogram of level `n` rescaled to unit mass, its
/// windowed L¹ distance to the classical tomogram, and the mass error of the
/// unscaled stationary-phase form.
fn box_frame_distance(n: usize, length: f64, frame: TomographyFrame) -> Result<(Tomogram, f64, f64)> {
    let (mu, nu) = (frame.mu, frame.nu);
    let edges = [-SQRT_2 * nu, -SQRT_2 * nu + mu * length, SQRT_2 * nu, SQRT_2 * nu + mu * length];
    let lo = edges.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = edges.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let margin = 0.05 * (hi - lo);
    let period = mu.abs() * length / n as f64;
    let grid = UniformGrid::with_max_step(lo - margin, hi + margin, period / 16.0)?;
    let values = grid
        .points()
        .into_iter()
        .map(|x| box_tomogram_stationary_phase(n, length, frame, x))
        .collect::<Result<Vec<_>>>()?;
    // the beat term leaves an O(1/n) mass error; compare shapes at unit mass
    let raw = Tomogram::new(frame, grid, values, Vec::new())?;
    let t = raw.scaled(1.0 / raw.mass());
    let averaged = local_average(&grid, t.values(), |_| 0.5 * period);
    let classical = classical_box_tomogram_grid(frame, length, 1.0, grid)?;
    let cells = 2.0 * grid.step();
    let d = l1_masked(&grid, &averaged, classical.values(), |x| {
        edges.iter().all(|e| (x - e).abs() > cells)
    });
    Ok((t, d, raw.normalization_residual()?))
}

/// L¹ distance, times `L`, between the one-period average of `(2/L)sin²(nπX/L)`
/// and `1/L` on the box interior.
fn box_position_plateau(n: usize, length: f64) -> Result<f64> {
    let period = length / n as f64;
    let grid = UniformGrid::with_max_step(0.0, length, period / 32.0)?;
    let t = box_tomogram(n, length, TomographyFrame::POSITION, grid, box_unit_energy_hbar(n, length))?;
    let averaged = local_average(&grid, t.values(), |_| 0.5 * period);
    let flat = vec![1.0 / length; grid.len()];
    Ok(length * l1_masked(&grid, &averaged, &flat, |x| x > period && x < length - period))
}

/// Mass of the quadrature tomogram at `(0.02, 1)` within `0.1` of `X = ±√2`.
fn box_momentum_concentration(n: usize, length: f64) -> Result<f64> {
    let frame = TomographyFrame::new(0.02, 1.0);
    let hbar = box_unit_energy_hbar(n, length);
    let reach = SQRT_2 + 0.1 + frame.mu * length;
    // momentum lobes have width ~ πħ/L
    let grid = UniformGrid::with_max_step(-reach, reach, PI * hbar / (8.0 * length))?;
    let t = box_tomogram(n, length, frame, grid, hbar)?;
    Ok(t.mass_in(-SQRT_2 - 0.1, -SQRT_2 + 0.1) + t.mass_in(SQRT_2 - 0.1, SQRT_2 + 0.1))
}

/// Local period in `X` of the `sin²` oscillation of the oscillator level `n`
/// at `ħ = 1/n` in the frame `(1, 0)`, `√2π / (2(n + ½)√(1 - X²/2))`.
/// Infinite outside the classical region.
pub fn oscillator_local_period(n: usize, x: f64) -> f64 {
    let s = 1.0 - 0.5 * x * x;
    if s <= 0.0 {
        f64::INFINITY
    } else {
        SQRT_2 * PI / (2.0 * (n as f64 + 0.5) * s.sqrt())
    }
}

/// `W_n(X, 1, 0)` at `ħ = 1/n` through the uniform Airy asymptotic of
/// `U(-(n + ½), √(2n) X)`, `W_n = √(n/π) U² / n!`.
fn oscillator_u_route(n: usize, x: f64) -> Result<f64> {
    let nf = n as f64;
    let u = parabolic_u_asymptotic_parts(-(nf + 0.5), (2.0 * nf).sqrt() * x.abs())?;
    if u.airy_factor == 0.0 {
        return Ok(0.0);
    }
    Ok((0.5 * (nf / PI).ln() - log_gamma(nf + 1.0)? + u.ln_square()).exp())
}

/// Oscillator levels with `ħ = 1/n` (energy `(n + ½)/n -> 1`) compared with
/// the arcsine law of unit energy. The tomogram is averaged over three
/// local periods and compared in L¹ on `|X| <= 1.3 r`, `r = |(mu, nu)|`,
/// with the turning-point band `√2 r ± 0.1 r` excluded.
pub fn ehrenfest_oscillator(n_values: &[usize], frame: TomographyFrame) -> Result<LimitReport> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    let ns: Vec<f64> = n_values.iter().map(|n| *n as f64).collect();
    require_monotone(&ns, 2, "ehrenfest-oscillator n")?;
    if ns.windows(2).any(|w| w[1] < w[0]) || n_values[0] < 20 {
        return Err(TomoError::InvalidArgument(format!(
            "ehrenfest-oscillator needs increasing n >= 20, got {n_values:?}"
        )));
    }
    let r = frame.norm();
    let points = n_values
        .par_iter()
        .map(|&n| -> Result<(Tomogram, BTreeMap<String, f64>)> {
            let hbar = 1.0 / n as f64;
            let grid = UniformGrid::with_max_step(-2.2 * r, 2.2 * r, r * oscillator_local_period(n, 0.0) / 16.0)?;
            let t = Tomogram::from_fn(frame, grid, |x| hermite_tomogram(n, frame, x, hbar, 1.0).unwrap_or(f64::NAN))?;
            let residual = require_normalized(&t, "oscillator level")?;
            let averaged = local_average(&grid, t.values(), |x| 1.5 * r * oscillator_local_period(n, (x / r).min(1.3)));
            let classical = grid
                .points()
                .into_iter()
                .map(|x| classical_oscillator_tomogram(x, frame, 1.0))
                .collect::<Result<Vec<_>>>()?;
            let turning = SQRT_2 * r;
            let l1 = l1_masked(&grid, &averaged, &classical, |x| {
                x.abs() <= 1.3 * r && (x.abs() - turning).abs() > 0.1 * r
            });
            // U route against the Hermite route, relative to the local envelope
            let mut u_dev: f64 = 0.0;
            for (i, x) in grid.points().into_iter().enumerate() {
                if x.abs() > 1.3 * r {
                    continue;
                }
                let u = oscillator_u_route(n, x / r)? / r;
                let reach = r * oscillator_local_period(n, x / r);
                let envelope = grid
                    .points()
                    .iter()
                    .zip(t.values())
                    .skip(i.saturating_sub((reach / grid.step()) as usize + 1))
                    .take_while(|(y, _)| **y <= x + reach)
                    .filter(|(y, _)| (**y - x).abs() <= reach)
                    .map(|(_, v)| *v)
                    .fold(0.0, f64::max);
                u_dev = u_dev.max((u - t.values()[i]).abs() / envelope);
            }
            let details = BTreeMap::from([
                ("n".to_string(), n as f64),
                ("hbar".into(), hbar),
                ("normalization_residual".into(), residual),
                ("l1".into(), l1),
                ("forbidden_value".into(), hermite_tomogram(n, frame, 2.0 * r, hbar, 1.0)? * r),
                ("forbidden_bound".into(), (-(n as f64) / 10.0).exp()),
                ("u_route_deviation".into(), u_dev),
            ]);
            Ok((t, details))
        })
        .collect::<Result<Vec<_>>>()?;
    let near_100 = points
        .iter()
        .min_by_key(|(_, d)| (d["n"] as i64 - 100).abs())
        .map(|(_, d)| d["u_route_deviation"])
        .unwrap();
    let centre = classical_oscillator_tomogram(0.0, TomographyFrame::POSITION, 1.0)?;
    let checks = vec![
        Check::below("final_l1", points.last().unwrap().1["l1"], 0.03),
        Check::below(
            "forbidden_value_over_bound",
            points
                .iter()
                .map(|(_, d)| d["forbidden_value"] / d["forbidden_bound"])
                .fold(0.0, f64::max),
            1.0,
        ),
        Check::below("u_route_deviation", near_100, 0.02),
        Check::below("classical_centre_deviation", (centre - 1.0 / (SQRT_2 * PI)).abs(), 1e-15),
    ];
    let distances: Vec<f64> = points.iter().map(|(_, d)| d["l1"]).collect();
    finish(
        "ehrenfest-oscillator",
        json!({ "ns": n_values, "frame": frame, "energy": 1.0 }),
        &ns,
        distances,
        checks,
        points,
        strictly_decreasing,
    )
}

/// Assemble a report. The verdict is converged when every check passes and
/// `improving` holds for the distances, not-converged otherwise.
fn finish(
    study: &str,
    parameters: serde_json::Value,
    values: &[f64],
    distances: Vec<f64>,
    checks: Vec<Check>,
    points: Vec<(Tomogram, BTreeMap<String, f64>)>,
    improving: impl Fn(&[f64]) -> bool,
) -> Result<LimitReport> {
    let (exponent, r2) = fitted_exponent(values, &distances);
    let verdict = if checks.iter().all(|c| c.passed) && improving(&distances) {
        Verdict::Converged
    } else {
        Verdict::NotConverged
    };
    let (tomograms, details) = points.into_iter().unzip();
    Ok(LimitReport {
        study: study.into(),
        regime: Regime::Ehrenfest,
        parameters,
        parameter_name: if study == "ehrenfest-box" || study == "ehrenfest-oscillator" {
            "n"
        } else {
            "hbar"
        }
        .into(),
        values: values.to_vec(),
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
