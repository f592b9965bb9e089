use std::f64::consts::PI;

use anyhow::{bail, Result};
use num_complex::Complex64;
use serde_json::{json, Value};
use tomolab_core::phase::io::{grid2d_complex_csv, grid2d_csv, write_atomic};
use tomolab_core::phase::{CharacteristicTable, NuSlices};
use tomolab_core::quantum::{
    coherent_centre, density_grid_from_tomogram, density_matrix, required_nu_slices, state_tomogram, wigner_grid_from_density,
    wigner_grid_from_tomogram, StateKind, StateSpec, Window,
};
use tomolab_core::{GridFunction2D, Tomogram, TomographyFrame, UniformGrid};

use crate::{write_json, Outcome, RunConfig, Target};

/// Largest number of tomogram samples a reconstruction may request, for
/// closed-form states and for states that need quadrature.
pub const MAX_SAMPLES_CLOSED_FORM: usize = 100_000_000;
pub const MAX_SAMPLES_QUADRATURE: usize = 2_000_000;

/// Densities below this fraction of their peak count as outside the support.
const SUPPORT_CUTOFF: f64 = 1e-12;

/// Frame-spacing margin under the Nyquist limit.
const NYQUIST_MARGIN: f64 = 0.9;

/// Largest X step of the tomograms fed to the characteristic function.
const MAX_X_STEP: f64 = 0.1;

/// Half-width of the region where `|f|² > SUPPORT_CUTOFF · max |f|²`,
/// measured from the origin.
fn occupied_half(w: Window, density: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let g = UniformGrid::new(w.lo, w.hi, 4001)?;
    let v = g.points().into_iter().map(&density).collect::<Result<Vec<_>>>()?;
    let peak = v.iter().copied().fold(0.0, f64::max);
    let inside: Vec<usize> = (0..v.len()).filter(|&i| v[i] > SUPPORT_CUTOFF * peak).collect();
    let (Some(&a), Some(&b)) = (inside.first(), inside.last()) else {
        bail!("state has no occupied region in [{}, {}]", w.lo, w.hi);
    };
    let (lo, hi) = (g.point(a.saturating_sub(1)), g.point((b + 1).min(g.len() - 1)));
    Ok(lo.abs().max(hi.abs()))
}

/// `(q_half, p_half)` bounding the Wigner function of the state.
pub fn state_support(state: &StateSpec) -> Result<(f64, f64)> {
    let q = occupied_half(state.position_window(), |x| Ok(state.psi(x)?.norm_sqr()))?;
    let p = occupied_half(state.momentum_window(), |x| Ok(state.psi_hat(x)?.norm_sqr()))?;
    Ok((q, p))
}

/// Symmetric frame axis reaching `reach` with spacing under the Nyquist
/// limit of a density of half-width `half`.
fn frame_axis(reach: f64, half: f64) -> Result<UniformGrid> {
    let spacing = NYQUIST_MARGIN * PI / half;
    let steps = (reach / spacing).ceil().max(1.0) as usize;
    Ok(UniformGrid::symmetric(steps as f64 * spacing, 2 * steps + 1)?)
}

fn frame_grid(state: &StateSpec, support: (f64, f64), frame: TomographyFrame) -> tomolab_core::Result<UniformGrid> {
    let half = frame.mu.abs() * support.0 + frame.nu.abs() * support.1;
    let step = (state.frame_window(frame).max_panel / 4.0).min(MAX_X_STEP);
    UniformGrid::with_max_step(-half, half, step)
}

fn frame_tomogram(state: &StateSpec, support: (f64, f64), frame: TomographyFrame) -> tomolab_core::Result<Tomogram> {
    state_tomogram(state, frame, frame_grid(state, support, frame)?)
}

/// Refuses a frame family whose tomograms hold more samples than the
/// budget for the state's evaluation route.
fn check_budget(state: &StateSpec, support: (f64, f64), frames: impl Iterator<Item = TomographyFrame>) -> Result<()> {
    let mut samples = 0;
    for f in frames.filter(|f| !f.is_zero()) {
        samples += frame_grid(state, support, f)?.len();
    }
    let limit = match state.kind {
        StateKind::BoxEigen { .. } | StateKind::CustomGrid(_) => MAX_SAMPLES_QUADRATURE,
        _ => MAX_SAMPLES_CLOSED_FORM,
    };
    if samples > limit {
        bail!("reconstruction needs {samples} tomogram samples, more than {limit}; declare a smaller --support q_half,p_half or coarsen --grid");
    }
    Ok(())
}

fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * cur / (k + 1) as f64 - k as f64 * prev / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Reference Wigner function: closed forms for oscillator eigenstates and
/// coherent states, the density-matrix transform for the other catalog
/// states, none for sampled states.
fn reference_wigner(state: &StateSpec, q: UniformGrid, p: UniformGrid) -> Result<Option<(&'static str, GridFunction2D<f64>)>> {
    let h = state.hbar;
    match &state.kind {
        StateKind::HoEigen { n, varpi } => {
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            let w = GridFunction2D::from_fn(q, p, |q, p| {
                let r2 = (varpi * q * q + p * p / varpi) / h;
                sign * (-r2).exp() * laguerre(*n, 2.0 * r2)
            })?;
            Ok(Some(("closed-form", w)))
        }
        StateKind::Coherent { alpha, varpi } => {
            let (q0, p0) = coherent_centre(*alpha, h, *varpi);
            let w = GridFunction2D::from_fn(q, p, |q, p| {
                2.0 * (-(varpi * (q - q0).powi(2) + (p - p0).powi(2) / varpi) / h).exp()
            })?;
            Ok(Some(("closed-form", w)))
        }
        StateKind::CustomGrid(_) => Ok(None),
        _ => {
            let pw = state.position_window();
            let (_, p_half) = state_support(state)?;
            let step = pw.max_panel.min(h / p_half) / 4.0;
            let grid = UniformGrid::with_max_step(pw.lo, pw.hi, step)?;
            let (w, _) = wigner_grid_from_density(&density_matrix(state, grid)?, q, p, h)?;
            Ok(Some(("density-matrix", w)))
        }
    }
}

fn max_error<T: Copy>(a: &GridFunction2D<T>, b: &GridFunction2D<T>, norm: impl Fn(T, T) -> f64) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| norm(*x, *y)).fold(0.0, f64::max)
}

/// Rebuilds the Wigner function or the density matrix from the state's own
/// tomograms and, for catalog states, reports the max-norm error.
pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<Outcome> {
    let state = cfg.parse_state(None)?;
    let target = cfg.target.unwrap_or(Target::Wigner);
    let support = match cfg.support {
        Some([q, p]) if q > 0.0 && p > 0.0 => (q, p),
        Some(s) => bail!("--support must be two positive half-widths, got {s:?}"),
        None => state_support(&state)?,
    };
    let hbar = state.hbar;
    let mut out = Outcome::new();
    let mut report = json!({
        "config": cfg.to_json(),
        "state": state.descriptor(),
        "hbar": hbar,
        "target": target,
        "support": [support.0, support.1],
    });
    match target {
        Target::Wigner => {
            let (qg, pg) = match &cfg.grid {
                Some(g) => (g.grid()?, g.grid()?),
                None => (UniformGrid::symmetric(support.0, 41)?, UniformGrid::symmetric(support.1, 41)?),
            };
            let q_half = support.0.max(qg.min.abs()).max(qg.max.abs());
            let p_half = support.1.max(pg.min.abs()).max(pg.max.abs());
            let mu = frame_axis(2.0 * support.1 / hbar, q_half)?;
            let nu = frame_axis(2.0 * support.0 / hbar, p_half)?;
            check_budget(
                &state,
                support,
                (0..mu.len() * nu.len()).map(|k| TomographyFrame::new(mu.point(k / nu.len()), nu.point(k % nu.len()))),
            )?;
            let table = CharacteristicTable::build(mu, nu, |f| frame_tomogram(&state, support, f))?;
            let (w, imaginary) = wigner_grid_from_tomogram(&table, qg, pg, hbar, (q_half, p_half))?;
            let path = cfg.out.join("wigner.csv");
            write_atomic(&path, grid2d_csv(["q", "p", "W"], &w).as_bytes())?;
            out.files.push(path.clone());
            out.lines.push(format!(
                "{} frames ({} x {}), wrote {}",
                mu.len() * nu.len(),
                mu.len(),
                nu.len(),
                path.display()
            ));
            out.lines.push(format!("largest imaginary residual {imaginary:.3e}"));
            report["frame_grid"] = json!({ "mu": mu, "nu": nu });
            report["imaginary_residual"] = json!(imaginary);
            let (k, lowest) = w
                .values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |m, (k, v)| if *v < m.1 { (k, *v) } else { m });
            report["min_value"] = json!({ "q": qg.point(k / pg.len()), "p": pg.point(k % pg.len()), "W": lowest });
            if let Some((reference, exact)) = reference_wigner(&state, qg, pg)? {
                let err = max_error(&w, &exact, |a, b| (a - b).abs());
                out.lines.push(format!("max |W - W_exact| = {err:.3e} ({reference} reference)"));
                report["exact"] = json!({ "reference": reference, "max_error": err });
            }
        }
        Target::Density => {
            let grid = match &cfg.grid {
                Some(g) => g.grid()?,
                None => UniformGrid::symmetric(support.0, 25)?,
            };
            let x_half = support.0.max(grid.min.abs()).max(grid.max.abs());
            let mu = frame_axis(2.0 * support.1 / hbar, x_half)?;
            let nus = required_nu_slices(&grid, hbar);
            check_budget(
                &state,
                support,
                nus.iter()
                    .flat_map(|&nu| (0..mu.len()).map(move |i| TomographyFrame::new(mu.point(i), nu))),
            )?;
            let n_slices = nus.len();
            let slices = NuSlices::build(mu, nus, |f| frame_tomogram(&state, support, f))?;
            let (rho, hermiticity) = density_grid_from_tomogram(&slices, grid, hbar)?;
            let path = cfg.out.join("density.csv");
            write_atomic(&path, grid2d_complex_csv(["x", "x'"], &rho).as_bytes())?;
            out.files.push(path.clone());
            out.lines.push(format!(
                "{} frames ({} mu x {} nu slices), wrote {}",
                mu.len() * n_slices,
                mu.len(),
                n_slices,
                path.display()
            ));
            out.lines.push(format!("hermiticity residual {hermiticity:.3e}"));
            report["frame_grid"] = json!({ "mu": mu, "nu_slices": n_slices });
            report["hermiticity_residual"] = json!(hermiticity);
            if !matches!(state.kind, StateKind::CustomGrid(_)) {
                let exact = density_matrix(&state, grid)?;
                let err = max_error(&rho, &exact, |a: Complex64, b: Complex64| (a - b).norm());
                out.lines.push(format!("max |rho - rho_exact| = {err:.3e}"));
                report["exact"] = json!({ "reference": "wave-function", "max_error": err });
            }
        }
    }
    let path = cfg.out.join("reconstruct.json");
    write_json(&path, &report)?;
    out.files.push(path);
    Ok(out)
}

/// Reads a field of a reconstruction report.
pub fn exact_error(report: &Value) -> Option<f64> {
    report.get("exact")?.get("max_error")?.as_f64()
}
