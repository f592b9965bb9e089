use rayon::prelude::*;

use super::closed_form::{classical_box_tomogram_grid, oscillator_cell_mass, oscillator_radius};
use super::ClassicalModel;
use crate::error::{Result, TomoError};
use crate::phase::{DeltaAtom, Tomogram, TomographyFrame, UniformGrid};

/// Time samples per period used to bracket roots and extrema of a generic
/// trajectory.
pub const TIME_MESH: usize = 8192;

const BISECTIONS: usize = 80;

/// A mesh step that changes X this many times more than both neighbours is a jump.
const JUMP_RATIO: f64 = 10.0;

/// Mass error beyond which a generic time average is reported as unresolved.
const RESOLUTION_TOL: f64 = 0.05;

/// Instantaneous tomogram `δ(X - mu q(t) - nu p(t))` of a trajectory model.
pub fn trajectory_tomogram(model: &ClassicalModel, t: f64, frame: TomographyFrame) -> Result<DeltaAtom> {
    let (q, p) = model
        .phase_point(t)
        .ok_or_else(|| TomoError::InvalidArgument("a density grid has no trajectory".into()))?;
    DeltaAtom::new(1.0, frame.project(q, p))
}

/// `(1/T) ∫_0^T δ(X - mu q(t) - nu p(t)) dt` on `grid`.
///
/// Away from turning points the value is the root sum
/// `(1/T) Σ 1 / |d/dt (mu q + nu p)|` over the times where the trajectory
/// crosses `X`. Grid cells holding a turning point, where that sum diverges,
/// carry their cell-averaged mass instead (exact for the box and the
/// oscillator, from refined level crossings for generic trajectories).
pub fn time_averaged_tomogram(model: &ClassicalModel, frame: TomographyFrame, grid: UniformGrid) -> Result<Tomogram> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    match model {
        ClassicalModel::DensityGrid(_) => Err(TomoError::InvalidArgument("time averages need a trajectory model".into())),
        ClassicalModel::BoxTrajectory { length, energy } => classical_box_tomogram_grid(frame, *length, *energy, grid),
        ClassicalModel::OscillatorTrajectory { energy } => oscillator_average(frame, *energy, grid),
        ClassicalModel::PointTrajectory(tr) => {
            let period = tr
                .period()
                .ok_or_else(|| TomoError::InvalidArgument("time average of an aperiodic trajectory".into()))?;
            generic_average(&|t| frame.project(tr.position(t), tr.momentum(t)), period, frame, grid)
        }
    }
}

fn oscillator_average(frame: TomographyFrame, energy: f64, grid: UniformGrid) -> Result<Tomogram> {
    let r = oscillator_radius(frame, energy);
    let h = grid.step();
    let values = grid
        .points()
        .into_iter()
        .map(|x| {
            let (a, b) = (x - 0.5 * h, x + 0.5 * h);
            if (a..=b).contains(&r) || (a..=b).contains(&-r) {
                oscillator_cell_mass(a, b, r) / h
            } else if x.abs() < r {
                1.0 / (std::f64::consts::PI * (r * r - x * x).sqrt())
            } else {
                0.0
            }
        })
        .collect();
    Tomogram::new(frame, grid, values, Vec::new())
}

/// Refine a sign change of `g` on `[a, b]` by bisection.
fn bisect(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..BISECTIONS {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Local extremum of `x` inside `[a, b]` by golden-section search. The best
/// value seen is returned, which also handles jumps such as wall bounces.
fn extremum(x: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, maximum: bool) -> f64 {
    let sign = if maximum { -1.0 } else { 1.0 };
    let f = |t: f64| sign * x(t);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut best = f(a).min(f(b));
    for _ in 0..100 {
        let (fc, fd) = (f(c), f(d));
        best = best.min(fc).min(fd);
        if fc < fd {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    sign * best
}

fn generic_average(x: &(dyn Fn(f64) -> f64 + Sync), period: f64, frame: TomographyFrame, grid: UniformGrid) -> Result<Tomogram> {
    let dt = period / TIME_MESH as f64;
    let times: Vec<f64> = (0..=TIME_MESH).map(|k| dt * k as f64).collect();
    let samples: Vec<f64> = times.iter().map(|t| x(*t)).collect();

    // singular values: local extrema of X(t) (including across the period
    // seam) and both sides of jumps, where the tomogram has edges
    let mut turning = Vec::new();
    let diff = |k: usize| samples[(k + 1) % TIME_MESH] - samples[k % TIME_MESH];
    for k in 0..TIME_MESH {
        let prev = if k == 0 { samples[TIME_MESH - 1] } else { samples[k - 1] };
        let (cur, next) = (samples[k], samples[k + 1]);
        if (cur - prev) * (next - cur) < 0.0 {
            let t0 = if k == 0 { -dt } else { times[k - 1] };
            turning.push(extremum(x, t0, times[k + 1], cur > prev));
        }
        let neighbours = diff(k + TIME_MESH - 1).abs().max(diff(k + 1).abs());
        if diff(k).abs() > JUMP_RATIO * neighbours {
            turning.extend([cur, next]);
        }
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));

    let h = grid.step();
    let deriv_step = period * 1e-7;
    let crossings = |level: f64| -> Vec<f64> {
        let g = |t: f64| x(t) - level;
        let mut roots = Vec::new();
        for k in 0..TIME_MESH {
            let (ga, gb) = (samples[k] - level, samples[k + 1] - level);
            if ga == 0.0 {
                roots.push(times[k]);
            } else if ga * gb < 0.0 {
                roots.push(bisect(&g, times[k], times[k + 1]));
            }
        }
        roots
    };
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = grid.point(i);
            let (a, b) = (xi - 0.5 * h, xi + 0.5 * h);
            if turning.iter().any(|v| *v >= a - h && *v <= b + h) {
                cell_mass(x, period, &crossings(a), &crossings(b), a, b) / h
            } else {
                crossings(xi)
                    .into_iter()
                    .map(|t| {
                        let v = (x(t + deriv_step) - x(t - deriv_step)) / (2.0 * deriv_step);
                        1.0 / (period * v.abs())
                    })
                    .sum()
            }
        })
        .collect();
    let t = Tomogram::new(frame, grid, values, Vec::new())?;
    if lo >= grid.min && hi <= grid.max && (t.mass() - 1.0).abs() > RESOLUTION_TOL {
        return Err(TomoError::Resolution(format!(
            "X(t) stays in [{lo}, {hi}] but the sampled tomogram has mass {}; refine the time mesh or the X grid",
            t.mass()
        )));
    }
    Ok(t)
}

/// Fraction of the period that `X(t)` spends in `[a, b)`, from the sorted
/// level crossings of both cell edges.
fn cell_mass(x: &dyn Fn(f64) -> f64, period: f64, ca: &[f64], cb: &[f64], a: f64, b: f64) -> f64 {
    let mut cuts: Vec<f64> = Vec::with_capacity(ca.len() + cb.len() + 2);
    cuts.push(0.0);
    cuts.extend_from_slice(ca);
    cuts.extend_from_slice(cb);
    cuts.push(period);
    cuts.sort_by(f64::total_cmp);
    let inside: f64 = cuts
        .windows(2)
        .filter(|w| {
            let v = x(0.5 * (w[0] + w[1]));
            v >= a && v < b
        })
        .map(|w| w[1] - w[0])
        .sum();
    inside / period
}
