//! Classical tomograms: Radon transforms of phase-space densities, point
//! trajectories and their time averages, the inverse transform, and the
//! closed forms for a particle in a box and a harmonic oscillator.

mod closed_form;
mod radon;
mod trajectory;

use std::fmt;
use std::sync::Arc;

pub use closed_form::{
    box_cell_mass, classical_box_density, classical_box_tomogram, classical_box_tomogram_grid, classical_oscillator_tomogram,
    oscillator_cell_mass, oscillator_radius,
};
pub use radon::{inverse_radon, inverse_radon_grid, projected_x_grid, radon_density, InverseValue};
pub use trajectory::{time_averaged_tomogram, trajectory_tomogram, TIME_MESH};

use crate::error::{Result, TomoError};
use crate::phase::GridFunction2D;

/// Tolerance on `∫ f dq dp = 1` for grid densities.
pub const DENSITY_MASS_TOL: f64 = 1e-3;

type PathFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A phase-space point moving along `(q(t), p(t))`.
#[derive(Clone)]
pub struct PointTrajectory {
    q: PathFn,
    p: PathFn,
    period: Option<f64>,
}

impl fmt::Debug for PointTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointTrajectory")
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

impl PointTrajectory {
    /// A `period`-periodic trajectory; the end points must agree to `1e-9`.
    pub fn periodic(
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
        p: impl Fn(f64) -> f64 + Send + Sync + 'static,
        period: f64,
    ) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(TomoError::InvalidArgument(format!("period must be positive, got {period}")));
        }
        let (dq, dp) = ((q(0.0) - q(period)).abs(), (p(0.0) - p(period)).abs());
        if dq >= 1e-9 || dp >= 1e-9 {
            return Err(TomoError::InvalidArgument(format!(
                "trajectory is not periodic: |q(0) - q(T)| = {dq:.3e}, |p(0) - p(T)| = {dp:.3e}"
            )));
        }
        Ok(PointTrajectory {
            q: Arc::new(q),
            p: Arc::new(p),
            period: Some(period),
        })
    }

    /// A trajectory without a period; it has atoms but no time average.
    pub fn aperiodic(q: impl Fn(f64) -> f64 + Send + Sync + 'static, p: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        PointTrajectory {
            q: Arc::new(q),
            p: Arc::new(p),
            period: None,
        }
    }

    /// Free motion of a unit mass, `q = q0 + p0 t`, `p = p0`.
    pub fn free_motion(q0: f64, p0: f64) -> Self {
        Self::aperiodic(move |t| q0 + p0 * t, move |_| p0)
    }

    /// Unit-frequency oscillator through `(q0, p0)` at `t = 0`.
    pub fn oscillator(q0: f64, p0: f64) -> Self {
        PointTrajectory {
            q: Arc::new(move |t: f64| q0 * t.cos() + p0 * t.sin()),
            p: Arc::new(move |t: f64| p0 * t.cos() - q0 * t.sin()),
            period: Some(2.0 * std::f64::consts::PI),
        }
    }

    pub fn position(&self, t: f64) -> f64 {
        (self.q)(t)
    }

    pub fn momentum(&self, t: f64) -> f64 {
        (self.p)(t)
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }
}

#[derive(Debug, Clone)]
pub enum ClassicalModel {
    /// Phase-space density `f(q, p)` on a `(q, p)` grid.
    DensityGrid(GridFunction2D<f64>),
    PointTrajectory(PointTrajectory),
    /// Unit mass bouncing between walls at `0` and `length` with energy `energy`.
    BoxTrajectory {
        length: f64,
        energy: f64,
    },
    /// Unit mass and frequency oscillator with energy `energy`.
    OscillatorTrajectory {
        energy: f64,
    },
}

impl ClassicalModel {
    /// Checks that `f >= 0` and integrates to one within [`DENSITY_MASS_TOL`].
    pub fn density_grid(f: GridFunction2D<f64>) -> Result<Self> {
        if let Some(v) = f.values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(TomoError::InvalidArgument(format!(
                "density value {v} is not a non-negative number"
            )));
        }
        let deficit = (f.integrate() - 1.0).abs();
        if deficit > DENSITY_MASS_TOL {
            return Err(TomoError::MassDeficit { deficit });
        }
        Ok(ClassicalModel::DensityGrid(f))
    }

    pub fn box_trajectory(length: f64, energy: f64) -> Result<Self> {
        if !(length > 0.0) || !(energy > 0.0) {
            return Err(TomoError::InvalidArgument(format!(
                "box needs positive length and energy, got L = {length}, E = {energy}"
            )));
        }
        Ok(ClassicalModel::BoxTrajectory { length, energy })
    }

    pub fn oscillator_trajectory(energy: f64) -> Result<Self> {
        if !(energy > 0.0) {
            return Err(TomoError::InvalidArgument(format!("energy must be positive, got {energy}")));
        }
        Ok(ClassicalModel::OscillatorTrajectory { energy })
    }

    /// Phase-space point at time `t` for trajectory models. The box starts at
    /// `q = 0` moving right; the oscillator starts at `q = √(2E)`, `p = 0`.
    pub fn phase_point(&self, t: f64) -> Option<(f64, f64)> {
        match self {
            ClassicalModel::DensityGrid(_) => None,
            ClassicalModel::PointTrajectory(tr) => Some((tr.position(t), tr.momentum(t))),
            ClassicalModel::BoxTrajectory { length, energy } => {
                let v = (2.0 * energy).sqrt();
                let period = 2.0 * length / v;
                let s = t.rem_euclid(period);
                if s * v <= *length {
                    Some((s * v, v))
                } else {
                    Some((2.0 * length - s * v, -v))
                }
            }
            ClassicalModel::OscillatorTrajectory { energy } => {
                let a = (2.0 * energy).sqrt();
                Some((a * t.cos(), -a * t.sin()))
            }
        }
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            ClassicalModel::DensityGrid(_) => None,
            ClassicalModel::PointTrajectory(tr) => tr.period(),
            ClassicalModel::BoxTrajectory { length, energy } => Some(2.0 * length / (2.0 * energy).sqrt()),
            ClassicalModel::OscillatorTrajectory { .. } => Some(2.0 * std::f64::consts::PI),
        }
    }
}
