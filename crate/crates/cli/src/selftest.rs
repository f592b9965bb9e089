//! Invariant battery run by `tomolab selftest`.

use std::f64::consts::PI;

use anyhow::Result;
use num_complex::Complex64;
use serde::Serialize;
use tomolab_core::classical::{classical_box_tomogram_grid, inverse_radon_grid, oscillator_cell_mass, projected_x_grid, radon_density};
use tomolab_core::phase::tomogram::trapezoid;
use tomolab_core::phase::{CharacteristicTable, NuSlices};
use tomolab_core::quantum::{
    cat_tomogram, coherent_tomogram, density_grid_from_tomogram, density_matrix, hermite_amplitude, hermite_tomogram, parse_state,
    required_nu_slices, state_tomogram, tomogram_from_wavefunction, tomogram_from_wigner, wigner_grid_from_tomogram, Parity, StateSpec,
};
use tomolab_core::{GridFunction2D, Tomogram, TomographyFrame, UniformGrid};

use crate::{auto_grid, write_json, Outcome, RunConfig};

#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    /// Factor applied to every computed tomogram mass. Anything but `1`
    /// simulates a normalization defect.
    pub mass_scale: f64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { mass_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub quick: bool,
    pub passed: bool,
    pub rows: Vec<Row>,
}

fn row(name: &str, value: f64, threshold: f64) -> Row {
    Row {
        name: name.into(),
        value,
        threshold,
        passed: value < threshold,
    }
}

/// Frames on a few radii and angles, none of them on an axis.
fn frames(count: usize) -> Vec<TomographyFrame> {
    (0..count)
        .map(|k| {
            let r = [0.7, 1.0, 1.6][k % 3];
            let theta = 0.3 + 2.0 * PI * k as f64 / count as f64;
            TomographyFrame::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

fn catalog(hbar: f64) -> Result<Vec<StateSpec>> {
    [
        "ho:n=0",
        "ho:n=3",
        "coherent:re=1,im=0.5",
        "cat:even,re=1,im=0",
        "cat:odd,re=0.7,im=0.4",
        "superpos:n=0,m=2",
    ]
    .iter()
    .map(|d| Ok(parse_state(d, hbar)?))
    .collect()
}

fn normalization_closed_form(quick: bool, scale: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for hbar in [1.0, 0.3] {
        for state in catalog(hbar)? {
            for f in frames(if quick { 4 } else { 12 }) {
                let t = state_tomogram(&state, f, auto_grid(&state, f)?)?;
                worst = worst.max((scale * t.mass() - 1.0).abs());
            }
        }
    }
    Ok(worst)
}

fn normalization_quadrature(quick: bool, scale: f64) -> Result<f64> {
    let state = parse_state("box:n=3,L=1", 1.0)?;
    let mut worst: f64 = 0.0;
    for f in frames(if quick { 2 } else { 4 }) {
        let t = state_tomogram(&state, f, auto_grid(&state, f)?)?;
        worst = worst.max((scale * t.mass() - 1.0).abs());
    }
    Ok(worst)
}

/// Largest deviation of the axis tomograms from `|ψ|²` and `|ψ̂|²`.
fn marginals() -> Result<(f64, f64)> {
    let (mut pos, mut mom): (f64, f64) = (0.0, 0.0);
    for hbar in [1.0, 0.3] {
        for state in catalog(hbar)? {
            let g = UniformGrid::symmetric(4.0, 81)?;
            let tq = state_tomogram(&state, TomographyFrame::POSITION, g)?;
            let tp = state_tomogram(&state, TomographyFrame::MOMENTUM, g)?;
            for (i, x) in g.points().into_iter().enumerate() {
                pos = pos.max((tq.values()[i] - state.psi(x)?.norm_sqr()).abs());
                mom = mom.max((tp.values()[i] - state.psi_hat(x)?.norm_sqr()).abs());
            }
        }
    }
    Ok((pos, mom))
}

/// `|W(λX, λmu, λnu) |λ| - W(X, mu, nu)|` over the closed forms, relative
/// to `max(W, 1e-6)`: an odd cat vanishes at its centre up to rounding.
fn homogeneity() -> Result<f64> {
    let alpha = Complex64::new(0.8, -0.3);
    let mut worst: f64 = 0.0;
    for f in frames(6) {
        for x in [-1.3, -0.2, 0.0, 0.7, 1.9] {
            for lambda in [0.5, 2.0, -1.5] {
                let g = f.scaled(lambda);
                let pairs = [
                    (hermite_tomogram(4, g, lambda * x, 0.7, 1.0)?, hermite_tomogram(4, f, x, 0.7, 1.0)?),
                    (
                        coherent_tomogram(alpha, g, lambda * x, 0.7, 1.0)?,
                        coherent_tomogram(alpha, f, x, 0.7, 1.0)?,
                    ),
                    (
                        cat_tomogram(alpha, Parity::Odd, g, lambda * x, 0.7, 1.0)?,
                        cat_tomogram(alpha, Parity::Odd, f, x, 0.7, 1.0)?,
                    ),
                ];
                for (a, b) in pairs {
                    worst = worst.max((a * lambda.abs() - b).abs() / b.abs().max(1e-6));
                }
            }
        }
    }
    Ok(worst)
}

/// `|∫ A_n A_m* dX / (2πħ|nu|) - δ_nm|` for `n, m <= n_max`.
fn orthonormality(n_max: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for hbar in [0.3f64, 1.0] {
        for f in [
            TomographyFrame::new(0.0, 1.0),
            TomographyFrame::new(0.6, 0.8),
            TomographyFrame::new(-1.2, 0.5),
        ] {
            // A_n(X) lives on the scale 1/κ = |ζ| √ħ
            let unit = (f.mu * f.mu + f.nu * f.nu).sqrt() * hbar.sqrt();
            let half = unit * ((2.0 * n_max as f64 + 1.0).sqrt() + 10.0);
            let g = UniformGrid::with_max_step(-half, half, unit / 8.0)?;
            let amps: Vec<Vec<Complex64>> = (0..=n_max)
                .map(|n| {
                    g.points()
                        .into_iter()
                        .map(|x| Ok(hermite_amplitude(n, f, x, hbar, 1.0)?))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            let norm = 2.0 * PI * hbar * f.nu.abs();
            for n in 0..=n_max {
                for m in 0..=n_max {
                    let re: Vec<f64> = (0..g.len()).map(|i| (amps[n][i] * amps[m][i].conj()).re).collect();
                    let im: Vec<f64> = (0..g.len()).map(|i| (amps[n][i] * amps[m][i].conj()).im).collect();
                    let v = Complex64::new(trapezoid(&re, g.step()), trapezoid(&im, g.step())) / norm;
                    let delta = if n == m { 1.0 } else { 0.0 };
                    worst = worst.max((v - delta).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Closed forms against quadrature of the wave function, relative to the
/// tomogram peak.
fn dual_route(quick: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for state in catalog(0.5)? {
        for f in frames(if quick { 2 } else { 6 }) {
            let w = state.frame_window(f);
            let c = 0.5 * (w.lo + w.hi);
            let g = UniformGrid::new(c - 0.25 * (w.hi - w.lo), c + 0.25 * (w.hi - w.lo), if quick { 21 } else { 61 })?;
            let a = state_tomogram(&state, f, g)?;
            let b = tomogram_from_wavefunction(&state, f, g)?;
            let peak = a.values().iter().copied().fold(0.0, f64::max);
            for (x, y) in a.values().iter().zip(b.values()) {
                worst = worst.max((x - y).abs() / peak);
            }
        }
    }
    Ok(worst)
}

/// Mass of the classical box and oscillator tomograms.
fn classical_mass() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for f in frames(6) {
        let g = UniformGrid::symmetric(4.0, 801)?;
        let t = classical_box_tomogram_grid(f, 1.0, 1.0, UniformGrid::new(-4.0, 5.0, 901)?)?;
        worst = worst.max(t.normalization_residual()?);
        let r = (2.0 * (f.mu * f.mu + f.nu * f.nu)).sqrt();
        let h = g.step();
        let mass: f64 = g.points().iter().map(|x| oscillator_cell_mass(x - 0.5 * h, x + 0.5 * h, r)).sum();
        worst = worst.max((mass - 1.0).abs());
    }
    Ok(worst)
}

fn gaussian_density(half: f64, n: usize) -> Result<GridFunction2D<f64>> {
    let g = UniformGrid::symmetric(half, n)?;
    Ok(GridFunction2D::from_fn(g, g, |q, p| (-0.5 * (q * q + p * p)).exp() / (2.0 * PI))?)
}

/// Radon transform and inverse of a unit Gaussian density.
fn radon_round_trip() -> Result<f64> {
    let f = gaussian_density(6.0, 241)?;
    let m = UniformGrid::symmetric(6.0, 25)?;
    let table = CharacteristicTable::build(m, m, |fr| radon_density(&f, fr, projected_x_grid(&f, fr, 0.05)?))?;
    let g = UniformGrid::symmetric(3.0, 13)?;
    let (back, _) = inverse_radon_grid(&table, g, g, (6.0, 6.0))?;
    let exact = GridFunction2D::from_fn(g, g, |q, p| (-0.5 * (q * q + p * p)).exp() / (2.0 * PI))?;
    Ok(back
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Ground-state Wigner function `2 e^{-q² - p²}` from its tomograms at `ħ = 1`.
fn wigner_round_trip() -> Result<f64> {
    let m = UniformGrid::symmetric(8.0, 33)?;
    let table = CharacteristicTable::build(m, m, |f| {
        let half = 12.0 * f.norm().max(0.1) + 1.0;
        Tomogram::from_fn(f, UniformGrid::with_max_step(-half, half, 0.05)?, |x| {
            hermite_tomogram(0, f, x, 1.0, 1.0).unwrap_or(f64::NAN)
        })
    })?;
    let g = UniformGrid::symmetric(3.0, 13)?;
    let (w, _) = wigner_grid_from_tomogram(&table, g, g, 1.0, (3.5, 3.5))?;
    let exact = GridFunction2D::from_fn(g, g, |q, p| 2.0 * (-q * q - p * p).exp())?;
    Ok(w.values.iter().zip(&exact.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Coherent-state density matrix from its tomograms at `ħ = 1`.
fn density_round_trip() -> Result<f64> {
    let alpha = Complex64::new(1.0, 0.0);
    let grid = UniformGrid::symmetric(3.0, 13)?;
    let mu = UniformGrid::symmetric(10.0, 81)?;
    let slices = NuSlices::build(mu, required_nu_slices(&grid, 1.0), |f| {
        let half = 10.0 * f.norm() + 4.0;
        Tomogram::from_fn(f, UniformGrid::with_max_step(-half, half, 0.05)?, |x| {
            coherent_tomogram(alpha, f, x, 1.0, 1.0).unwrap_or(f64::NAN)
        })
    })?;
    let (rho, _) = density_grid_from_tomogram(&slices, grid, 1.0)?;
    let exact = density_matrix(&StateSpec::coherent(alpha, 1.0)?, grid)?;
    Ok(rho
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Ground-state tomogram by line integrals of its Wigner function.
fn wigner_projection() -> Result<f64> {
    let g = UniformGrid::symmetric(7.0, 281)?;
    let w = GridFunction2D::from_fn(g, g, |q, p| 2.0 * (-q * q - p * p).exp())?;
    let mut worst: f64 = 0.0;
    for f in frames(4) {
        let x = UniformGrid::symmetric(3.0, 61)?;
        let t = tomogram_from_wigner(&w, f, x, 1.0)?;
        for (i, v) in t.values().iter().enumerate() {
            worst = worst.max((v - hermite_tomogram(0, f, x.point(i), 1.0, 1.0)?).abs());
        }
    }
    Ok(worst)
}

pub fn run_selftest(quick: bool, options: &SelftestOptions) -> Result<SelftestReport> {
    let (pos, mom) = marginals()?;
    let mut rows = vec![
        row(
            "normalization-closed-form",
            normalization_closed_form(quick, options.mass_scale)?,
            1e-6,
        ),
        row(
            "normalization-quadrature",
            normalization_quadrature(quick, options.mass_scale)?,
            1e-3,
        ),
        row("marginal-position", pos, 1e-6),
        row("marginal-momentum", mom, 1e-6),
        row("homogeneity", homogeneity()?, 1e-9),
        row("orthonormality", orthonormality(if quick { 4 } else { 8 })?, 1e-6),
        row("dual-route", dual_route(quick)?, 1e-6),
        row("classical-mass", classical_mass()?, 1e-9),
        row("round-trip-radon", radon_round_trip()?, 1e-3),
        row("round-trip-wigner", wigner_round_trip()?, 1e-3),
    ];
    if !quick {
        rows.push(row("round-trip-density", density_round_trip()?, 1e-3));
        rows.push(row("wigner-projection", wigner_projection()?, 1e-3));
    }
    Ok(SelftestReport {
        quick,
        passed: rows.iter().all(|r| r.passed),
        rows,
    })
}

/// Runs the battery and writes `selftest.json`. Failures are results, not
/// errors: they clear [`Outcome::passed`].
pub fn cmd_selftest(cfg: &RunConfig, options: &SelftestOptions) -> Result<Outcome> {
    let report = run_selftest(cfg.quick, options)?;
    let path = cfg.out.join("selftest.json");
    write_json(&path, &report)?;
    let mut out = Outcome::new();
    out.lines
        .push(format!("{:<28} {:>12} {:>10}  result", "check", "value", "threshold"));
    for r in &report.rows {
        out.lines.push(format!(
            "{:<28} {:>12.3e} {:>10.0e}  {}",
            r.name,
            r.value,
            r.threshold,
            if r.passed { "PASS" } else { "FAIL" }
        ));
    }
    out.lines.push(format!("wrote {}", path.display()));
    out.passed = report.passed;
    out.files.push(path);
    Ok(out)
}
