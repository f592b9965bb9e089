use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomoError};

/// Uniformly spaced axis `min, min + h, ..., max` with `count` points.
///
/// A grid with `count == 0` is the empty grid; otherwise `count >= 2` and
/// `max > min`. The last point is exactly `max`, so a grid survives a
/// round trip through its first and last sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(TomoError::InvalidArgument(format!("grid needs at least 2 points, got {count}")));
        }
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(TomoError::InvalidArgument(format!(
                "grid bounds must satisfy min < max, got [{min}, {max}]"
            )));
        }
        Ok(UniformGrid { min, max, count })
    }

    /// Grid centred on zero with the given half-width.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    /// Smallest grid with spacing at most `step` covering `[min, max]`.
    pub fn with_max_step(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(TomoError::InvalidArgument(format!("step must be positive, got {step}")));
        }
        let count = ((max - min) / step).ceil() as usize + 1;
        Self::new(min, max, count.max(2))
    }

    pub const fn empty() -> Self {
        UniformGrid {
            min: 0.0,
            max: 0.0,
            count: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        if i + 1 == self.count {
            self.max
        } else {
            self.min + self.step() * i as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.count >= 2 && x >= self.min && x <= self.max
    }

    /// Cell index `i` and fractional offset `t` in `[0, 1]` such that
    /// `x = point(i) + t * step`. `None` outside the grid.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !self.contains(x) {
            return None;
        }
        let s = (x - self.min) / self.step();
        let i = (s.floor() as usize).min(self.count - 2);
        Some((i, (s - i as f64).clamp(0.0, 1.0)))
    }

    /// Whether the grid is symmetric about zero to within a relative tolerance.
    pub fn is_symmetric(&self) -> bool {
        self.count >= 2 && (self.min + self.max).abs() <= 1e-12 * self.max.abs().max(1.0)
    }
}

/// Sampled function on a rectangular uniform grid.
///
/// The first axis is the row axis: `values[i * second.len() + j]` is the value
/// at `(first.point(i), second.point(j))`. Phase-space densities use
/// `(q, p)`, density matrices use `(x, x')`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D<T> {
    pub first: UniformGrid,
    pub second: UniformGrid,
    pub values: Vec<T>,
}

impl<T> GridFunction2D<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    pub fn new(first: UniformGrid, second: UniformGrid, values: Vec<T>) -> Result<Self> {
        if first.is_empty() || second.is_empty() {
            return Err(TomoError::InvalidArgument("2-D grid axes must be non-empty".into()));
        }
        if values.len() != first.len() * second.len() {
            return Err(TomoError::InvalidArgument(format!(
                "value matrix has {} entries, axes need {}x{}",
                values.len(),
                first.len(),
                second.len()
            )));
        }
        Ok(GridFunction2D { first, second, values })
    }

    /// Sample `f(a, b)` on the grid, row by row.
    pub fn from_fn(first: UniformGrid, second: UniformGrid, f: impl Fn(f64, f64) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(first.len() * second.len());
        for i in 0..first.len() {
            let a = first.point(i);
            for j in 0..second.len() {
                values.push(f(a, second.point(j)));
            }
        }
        Self::new(first, second, values)
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.second.len() + j]
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, a: f64, b: f64) -> T {
        let (Some((i, s)), Some((j, t))) = (self.first.locate(a), self.second.locate(b)) else {
            return T::default();
        };
        let n = self.second.len();
        let v00 = self.values[i * n + j];
        let v01 = self.values[i * n + j + 1];
        let v10 = self.values[(i + 1) * n + j];
        let v11 = self.values[(i + 1) * n + j + 1];
        v00 * ((1.0 - s) * (1.0 - t)) + v01 * ((1.0 - s) * t) + v10 * (s * (1.0 - t)) + v11 * (s * t)
    }

    /// Two-dimensional trapezoid rule over the whole grid.
    pub fn integrate(&self) -> T {
        let (n1, n2) = (self.first.len(), self.second.len());
        let mut total = T::default();
        for i in 0..n1 {
            let wi = if i == 0 || i + 1 == n1 { 0.5 } else { 1.0 };
            for j in 0..n2 {
                let wj = if j == 0 || j + 1 == n2 { 0.5 } else { 1.0 };
                total = total + self.values[i * n2 + j] * (wi * wj);
            }
        }
        total * (self.first.step() * self.second.step())
    }
}

impl GridFunction2D<f64> {
    /// Largest absolute value on the outermost ring of grid points.
    pub fn boundary_max(&self) -> f64 {
        let (n1, n2) = (self.first.len(), self.second.len());
        let mut m: f64 = 0.0;
        for i in 0..n1 {
            for j in 0..n2 {
                if i == 0 || j == 0 || i + 1 == n1 || j + 1 == n2 {
                    m = m.max(self.values[i * n2 + j].abs());
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl GridFunction2D<Complex64> {
    /// `max |f(a, b) - conj f(b, a)|` for a matrix on identical axes.
    pub fn hermiticity_residual(&self) -> Result<f64> {
        if self.first != self.second {
            return Err(TomoError::InvalidArgument("Hermiticity needs identical row and column axes".into()));
        }
        let n = self.first.len();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self.values[i * n + j] - self.values[j * n + i].conj()).norm());
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_point_is_exact() {
        let g = UniformGrid::new(-0.3, 0.7, 11).unwrap();
        assert_eq!(g.point(10), 0.7);
        assert_eq!(g.point(0), -0.3);
        assert!((g.step() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_axes() {
        assert!(UniformGrid::new(0.0, 1.0, 1).is_err());
        assert!(UniformGrid::new(1.0, 1.0, 5).is_err());
        assert!(UniformGrid::new(2.0, 1.0, 5).is_err());
    }

    #[test]
    fn locate_clamps_last_cell() {
        let g = UniformGrid::new(0.0, 1.0, 5).unwrap();
        assert_eq!(g.locate(1.0), Some((3, 1.0)));
        assert_eq!(g.locate(-0.01), None);
        let (i, t) = g.locate(0.3).unwrap();
        assert_eq!(i, 1);
        assert!((t - 0.2).abs() < 1e-12);
    }

    #[test]
    fn bilinear_reproduces_bilinear_functions() {
        let a = UniformGrid::new(-1.0, 1.0, 7).unwrap();
        let b = UniformGrid::new(0.0, 2.0, 5).unwrap();
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - 0.5 * y + 0.25 * x * y;
        let g = GridFunction2D::from_fn(a, b, f).unwrap();
        for &(x, y) in &[(0.1, 0.3), (-0.77, 1.9), (0.999, 0.001)] {
            assert!((g.interpolate(x, y) - f(x, y)).abs() < 1e-12);
        }
        assert_eq!(g.interpolate(1.5, 0.5), 0.0);
    }

    #[test]
    fn trapezoid_2d_is_exact_on_bilinear() {
        let a = UniformGrid::new(0.0, 1.0, 4).unwrap();
        let g = GridFunction2D::from_fn(a, a, |x, y| x * y).unwrap();
        assert!((g.integrate() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = UniformGrid::new(0.0, 1.0, 3).unwrap();
        assert!(GridFunction2D::new(a, a, vec![0.0; 8]).is_err());
    }
}
