use serde::{Deserialize, Serialize};

use super::frame::TomographyFrame;
use super::grid::UniformGrid;
use crate::error::{Result, TomoError};

/// Quadrature noise tolerated below zero before a sample is treated as an error.
pub const NEGATIVE_NOISE_FLOOR: f64 = 1e-10;

/// Exact point mass of a tomogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaAtom {
    pub weight: f64,
    pub location: f64,
}

impl DeltaAtom {
    pub fn new(weight: f64, location: f64) -> Result<Self> {
        if !(weight >= 0.0) || !location.is_finite() {
            return Err(TomoError::InvalidArgument(format!(
                "delta atom needs a non-negative weight and finite location, got ({weight}, {location})"
            )));
        }
        Ok(DeltaAtom { weight, location })
    }
}

/// Probability density in `X` for one frame: grid samples plus delta atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    frame: TomographyFrame,
    grid: UniformGrid,
    values: Vec<f64>,
    atoms: Vec<DeltaAtom>,
}

impl Tomogram {
    /// Build a tomogram from samples. Values in `[-1e-10, 0)` (relative to the
    /// sample maximum) are quadrature noise and are clamped to zero; anything
    /// more negative is rejected.
    pub fn new(frame: TomographyFrame, grid: UniformGrid, mut values: Vec<f64>, atoms: Vec<DeltaAtom>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(TomoError::InvalidArgument(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(TomoError::InvalidArgument("tomogram sample is not finite".into()));
            }
            if *v < 0.0 {
                if *v < -NEGATIVE_NOISE_FLOOR * scale {
                    return Err(TomoError::InvalidArgument(format!("negative tomogram sample {v}")));
                }
                *v = 0.0;
            }
        }
        for a in &atoms {
            DeltaAtom::new(a.weight, a.location)?;
        }
        Ok(Tomogram {
            frame,
            grid,
            values,
            atoms,
        })
    }

    /// Tomogram that is a single point mass on an otherwise zero grid.
    pub fn point_mass(frame: TomographyFrame, grid: UniformGrid, location: f64) -> Self {
        Tomogram {
            frame,
            grid,
            values: vec![0.0; grid.len()],
            atoms: vec![DeltaAtom { weight: 1.0, location }],
        }
    }

    pub fn from_fn(frame: TomographyFrame, grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(frame, grid, values, Vec::new())
    }

    pub fn frame(&self) -> TomographyFrame {
        self.frame
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn atoms(&self) -> &[DeltaAtom] {
        &self.atoms
    }

    pub fn into_parts(self) -> (TomographyFrame, UniformGrid, Vec<f64>, Vec<DeltaAtom>) {
        (self.frame, self.grid, self.values, self.atoms)
    }

    /// Trapezoid mass of the samples plus the atom weights.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.values, self.grid.step()) + self.atoms.iter().map(|a| a.weight).sum::<f64>()
    }

    /// `|mass - 1|`.
    pub fn normalization_residual(&self) -> Result<f64> {
        if self.grid.is_empty() && self.atoms.is_empty() {
            return Err(TomoError::EmptyTomogram);
        }
        Ok((self.mass() - 1.0).abs())
    }

    /// Linear interpolation of the smooth part; zero outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        match self.grid.locate(x) {
            Some((i, t)) => self.values[i] * (1.0 - t) + self.values[i + 1] * t,
            None => 0.0,
        }
    }

    /// Resample the smooth part onto another grid by linear interpolation.
    pub fn resample(&self, grid: UniformGrid) -> Tomogram {
        Tomogram {
            frame: self.frame,
            grid,
            values: grid.points().into_iter().map(|x| self.value_at(x)).collect(),
            atoms: self.atoms.clone(),
        }
    }

    /// `∫ W(X) g(X) dX` including the atoms.
    pub fn integrate_against(&self, g: impl Fn(f64) -> f64) -> f64 {
        let smooth: Vec<f64> = (0..self.grid.len()).map(|i| self.values[i] * g(self.grid.point(i))).collect();
        trapezoid(&smooth, self.grid.step()) + self.atoms.iter().map(|a| a.weight * g(a.location)).sum::<f64>()
    }

    /// Mass inside `[lo, hi]`: trapezoid over the clipped grid (with linear
    /// interpolation at the ends) plus atoms located in the interval.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        let c = self.cumulative();
        let at = |x: f64| -> f64 {
            if self.grid.is_empty() || x <= self.grid.min {
                0.0
            } else if x >= self.grid.max {
                *c.last().unwrap()
            } else {
                let (i, t) = self.grid.locate(x).unwrap();
                // exact integral of the linear interpolant up to x
                let h = self.grid.step();
                let (a, b) = (self.values[i], self.values[i + 1]);
                c[i] + h * t * (a + 0.5 * t * (b - a))
            }
        };
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.location >= lo && a.location <= hi)
            .map(|a| a.weight)
            .sum();
        at(hi) - at(lo) + atoms
    }

    /// Running trapezoid integral of the smooth part, one entry per grid point.
    pub fn cumulative(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.values, self.grid.step())
    }

    /// Grid location of the largest sample.
    pub fn argmax(&self) -> Option<f64> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| self.grid.point(i))
    }

    /// Mean and variance of the normalised distribution (atoms included).
    pub fn moments(&self) -> (f64, f64) {
        let m0 = self.mass();
        let m1 = self.integrate_against(|x| x) / m0;
        let m2 = self.integrate_against(|x| (x - m1) * (x - m1)) / m0;
        (m1, m2)
    }

    /// Scale the tomogram so that its mass becomes `mass * factor`. Used by
    /// sensitivity checks, never by the numerical routes.
    pub fn scaled(&self, factor: f64) -> Tomogram {
        Tomogram {
            frame: self.frame,
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| DeltaAtom {
                    weight: a.weight * factor,
                    location: a.location,
                })
                .collect(),
        }
    }
}

/// Trapezoid rule on a uniform grid, summed left to right.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            step * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * step * (values[i - 1] + v);
        }
        out.push(acc);
    }
    out
}
