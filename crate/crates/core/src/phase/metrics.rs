//! Distances between tomograms and the smoothing used to compare oscillatory
//! quantum tomograms with smooth classical ones.

use super::grid::UniformGrid;
use super::tomogram::{cumulative_trapezoid, trapezoid, DeltaAtom, Tomogram};
use crate::error::{Result, TomoError};

const FRAME_TOL: f64 = 1e-12;

fn check_frames(a: &Tomogram, b: &Tomogram) -> Result<()> {
    let (fa, fb) = (a.frame(), b.frame());
    if !fa.approx_eq(&fb, FRAME_TOL) {
        return Err(TomoError::FrameMismatch(fa.mu, fa.nu, fb.mu, fb.nu));
    }
    Ok(())
}

/// Total-variation style L¹ distance.
///
/// The smooth part of `b` is resampled onto the grid of `a` (or the reverse
/// when `a` has no grid) and `∫|a - b| dX` is taken by the trapezoid rule.
/// Atoms are matched to the nearest atom of the other tomogram within one grid
/// spacing; matched pairs contribute `|w_a - w_b|`, unmatched atoms their full
/// weight.
pub fn tomogram_distance_l1(a: &Tomogram, b: &Tomogram) -> Result<f64> {
    check_frames(a, b)?;
    let (reference, other) = if a.grid().is_empty() { (b, a) } else { (a, b) };
    let grid = *reference.grid();
    let smooth = if grid.is_empty() {
        0.0
    } else {
        let diff: Vec<f64> = if other.grid() == &grid {
            reference.values().iter().zip(other.values()).map(|(x, y)| (x - y).abs()).collect()
        } else {
            (0..grid.len())
                .map(|i| (reference.values()[i] - other.value_at(grid.point(i))).abs())
                .collect()
        };
        trapezoid(&diff, grid.step())
    };
    let tol = if grid.is_empty() { 1e-12 } else { grid.step() };
    Ok(smooth + atom_distance(a.atoms(), b.atoms(), tol))
}

fn atom_distance(a: &[DeltaAtom], b: &[DeltaAtom], tol: f64) -> f64 {
    let mut used = vec![false; b.len()];
    let mut total = 0.0;
    for atom in a {
        let nearest = b
            .iter()
            .enumerate()
            .filter(|(j, other)| !used[*j] && (other.location - atom.location).abs() <= tol)
            .min_by(|(_, x), (_, y)| (x.location - atom.location).abs().total_cmp(&(y.location - atom.location).abs()))
            .map(|(j, _)| j);
        match nearest {
            Some(j) => {
                used[j] = true;
                total += (atom.weight - b[j].weight).abs();
            }
            None => total += atom.weight,
        }
    }
    total + b.iter().zip(&used).filter(|(_, u)| !**u).map(|(atom, _)| atom.weight).sum::<f64>()
}

/// Wasserstein-1 distance `∫ |F_a(X) - F_b(X)| dX` between the two
/// distributions, atoms included. Both are used as given (not renormalised).
pub fn wasserstein1(a: &Tomogram, b: &Tomogram) -> Result<f64> {
    check_frames(a, b)?;
    let mut breaks: Vec<f64> = Vec::new();
    let mut step = f64::INFINITY;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in [a, b] {
        if !t.grid().is_empty() {
            step = step.min(t.grid().step());
            lo = lo.min(t.grid().min);
            hi = hi.max(t.grid().max);
        }
        for atom in t.atoms() {
            breaks.push(atom.location);
            lo = lo.min(atom.location);
            hi = hi.max(atom.location);
        }
    }
    if !lo.is_finite() {
        return Err(TomoError::EmptyTomogram);
    }
    if step.is_finite() {
        let n = ((hi - lo) / step).ceil() as usize;
        breaks.extend((0..=n).map(|i| (lo + step * i as f64).min(hi)));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let upto = |t: &Tomogram, x: f64, inclusive: bool| -> f64 {
        let atoms: f64 = t
            .atoms()
            .iter()
            .filter(|a| if inclusive { a.location <= x } else { a.location < x })
            .map(|a| a.weight)
            .sum();
        smooth_cdf(t, x) + atoms
    };
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let d0 = (upto(a, x0, true) - upto(b, x0, true)).abs();
        let d1 = (upto(a, x1, false) - upto(b, x1, false)).abs();
        total += 0.5 * (x1 - x0) * (d0 + d1);
    }
    Ok(total)
}

/// Mass of the smooth part below `x`, integrating the linear interpolant.
pub fn smooth_cdf(t: &Tomogram, x: f64) -> f64 {
    let g = t.grid();
    if g.is_empty() || x <= g.min {
        return 0.0;
    }
    t.mass_in(g.min, x)
        - t.atoms()
            .iter()
            .filter(|a| a.location >= g.min && a.location <= x)
            .map(|a| a.weight)
            .sum::<f64>()
}

/// Dual-Lipschitz (Kantorovich–Rubinstein) norm `∫ |∫_{-∞}^X s| dX` of a
/// signed density sampled on a uniform grid. For a zero-mass signed density it
/// is `sup ∫ s φ` over 1-Lipschitz test functions `φ`.
pub fn kantorovich_norm(values: &[f64], step: f64) -> f64 {
    let c = cumulative_trapezoid(values, step);
    let abs: Vec<f64> = c.iter().map(|v| v.abs()).collect();
    trapezoid(&abs, step)
}

/// Moving average of a sampled function over `[X - w(X), X + w(X)]`.
///
/// Uses the exact integral of the linear interpolant; the function is taken
/// as zero outside the grid.
pub fn local_average(grid: &UniformGrid, values: &[f64], half_width: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = grid.step();
    let c = cumulative_trapezoid(values, h);
    let cdf = |x: f64| -> f64 {
        if x <= grid.min {
            0.0
        } else if x >= grid.max {
            *c.last().unwrap()
        } else {
            let (i, t) = grid.locate(x).unwrap();
            let (a, b) = (values[i], values[i + 1]);
            c[i] + h * t * (a + 0.5 * t * (b - a))
        }
    };
    (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            let w = half_width(x);
            if w <= 0.0 {
                values[i]
            } else {
                (cdf(x + w) - cdf(x - w)) / (2.0 * w)
            }
        })
        .collect()
}

/// Trapezoid L¹ distance between two samplings on the same grid, counting only
/// grid points where `include` holds.
pub fn l1_masked(grid: &UniformGrid, a: &[f64], b: &[f64], include: impl Fn(f64) -> bool) -> f64 {
    let diff: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            if include(x) {
                (a[i] - b[i]).abs()
            } else {
                0.0
            }
        })
        .collect();
    trapezoid(&diff, grid.step())
}
