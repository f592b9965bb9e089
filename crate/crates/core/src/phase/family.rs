//! Tomogram families and their characteristic functions.
//!
//! Every inverse map integrates `W(X, mu, nu) e^{iX}` over `X` first, which
//! is the characteristic function `C(mu, nu) = E[e^{i(mu q + nu p)}]`. The
//! families below store that table rather than the tomograms themselves.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::frame::TomographyFrame;
use super::grid::{GridFunction2D, UniformGrid};
use super::tomogram::Tomogram;
use crate::error::{Result, TomoError};

/// Largest X spacing accepted when integrating against `e^{iX}`.
const MAX_X_STEP: f64 = PI / 4.0;

/// `∫ W(X) e^{iX} dX` plus the atoms' contributions.
pub fn characteristic(t: &Tomogram) -> Result<Complex64> {
    let g = t.grid();
    if !g.is_empty() && g.step() > MAX_X_STEP {
        return Err(TomoError::Nyquist {
            axis: "X",
            spacing: g.step(),
            limit: MAX_X_STEP,
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let n = g.len();
    for (i, &v) in t.values().iter().enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        sum += Complex64::from_polar(w * v, g.point(i));
    }
    sum *= g.step();
    for a in t.atoms() {
        sum += Complex64::from_polar(a.weight, a.location);
    }
    Ok(sum)
}

fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Characteristic function sampled on a rectangular `(mu, nu)` grid.
#[derive(Debug, Clone)]
pub struct CharacteristicTable {
    pub values: GridFunction2D<Complex64>,
}

impl CharacteristicTable {
    /// Evaluate `tomogram(frame)` on every node of the grid, in parallel. The
    /// frame `(0, 0)` is not evaluated: its tomogram is `δ(X)` for every
    /// normalised state, so `C(0, 0) = 1`.
    pub fn build<F>(mu: UniformGrid, nu: UniformGrid, tomogram: F) -> Result<Self>
    where
        F: Fn(TomographyFrame) -> Result<Tomogram> + Sync,
    {
        let frames: Vec<TomographyFrame> = (0..mu.len())
            .flat_map(|i| (0..nu.len()).map(move |j| TomographyFrame::new(mu.point(i), nu.point(j))))
            .collect();
        let values = frames
            .par_iter()
            .map(|f| {
                if f.is_zero() {
                    Ok(Complex64::new(1.0, 0.0))
                } else {
                    characteristic(&tomogram(*f)?)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::check_symmetric(&mu, &nu)?;
        Ok(CharacteristicTable {
            values: GridFunction2D::new(mu, nu, values)?,
        })
    }

    /// Table from precomputed tomograms listed in row-major `(mu, nu)` order.
    pub fn from_tomograms(mu: UniformGrid, nu: UniformGrid, tomograms: &[Tomogram]) -> Result<Self> {
        if tomograms.len() != mu.len() * nu.len() {
            return Err(TomoError::InvalidArgument(format!(
                "{} tomograms for a {}x{} frame grid",
                tomograms.len(),
                mu.len(),
                nu.len()
            )));
        }
        let mut values = Vec::with_capacity(tomograms.len());
        for (k, t) in tomograms.iter().enumerate() {
            let expected = TomographyFrame::new(mu.point(k / nu.len()), nu.point(k % nu.len()));
            let f = t.frame();
            if !f.approx_eq(&expected, 1e-12) {
                return Err(TomoError::FrameMismatch(f.mu, f.nu, expected.mu, expected.nu));
            }
            values.push(characteristic(t)?);
        }
        Self::check_symmetric(&mu, &nu)?;
        Ok(CharacteristicTable {
            values: GridFunction2D::new(mu, nu, values)?,
        })
    }

    fn check_symmetric(mu: &UniformGrid, nu: &UniformGrid) -> Result<()> {
        if !mu.is_symmetric() || !nu.is_symmetric() {
            return Err(TomoError::InvalidArgument("frame grid must be symmetric about the origin".into()));
        }
        Ok(())
    }

    pub fn mu(&self) -> &UniformGrid {
        &self.values.first
    }

    pub fn nu(&self) -> &UniformGrid {
        &self.values.second
    }

    /// The frame spacing aliases any density wider than `π / spacing` in the
    /// conjugate variable, so a density supported in `|q| <= q_half`,
    /// `|p| <= p_half` needs `Δmu <= π / q_half` and `Δnu <= π / p_half`.
    pub fn check_nyquist(&self, q_half: f64, p_half: f64) -> Result<()> {
        for (axis, spacing, half) in [("mu", self.mu().step(), q_half), ("nu", self.nu().step(), p_half)] {
            let limit = PI / half;
            if spacing > limit {
                return Err(TomoError::Nyquist { axis, spacing, limit });
            }
        }
        Ok(())
    }

    /// `∫∫ C(mu, nu) e^{-i(mu q + nu p)} dmu dnu` on a `(q, p)` grid by the
    /// trapezoid rule, factorised over the two frame axes.
    pub fn fourier_grid(&self, q: UniformGrid, p: UniformGrid) -> Result<GridFunction2D<Complex64>> {
        let (mu, nu) = (*self.mu(), *self.nu());
        let (nm, nn) = (mu.len(), nu.len());
        // inner[j][i] = Σ_k w_k C(mu_i, nu_k) e^{-i nu_k p_j}
        let inner: Vec<Vec<Complex64>> = (0..p.len())
            .into_par_iter()
            .map(|jp| {
                let pv = p.point(jp);
                let phases: Vec<Complex64> = (0..nn)
                    .map(|k| Complex64::from_polar(trapezoid_weight(k, nn), -nu.point(k) * pv))
                    .collect();
                (0..nm)
                    .map(|i| {
                        let row = &self.values.values[i * nn..(i + 1) * nn];
                        row.iter().zip(&phases).map(|(c, e)| c * e).sum()
                    })
                    .collect()
            })
            .collect();
        let scale = mu.step() * nu.step();
        let rows: Vec<Vec<Complex64>> = (0..q.len())
            .into_par_iter()
            .map(|iq| {
                let qv = q.point(iq);
                let phases: Vec<Complex64> = (0..nm)
                    .map(|i| Complex64::from_polar(trapezoid_weight(i, nm), -mu.point(i) * qv))
                    .collect();
                inner
                    .iter()
                    .map(|col| col.iter().zip(&phases).map(|(b, e)| b * e).sum::<Complex64>() * scale)
                    .collect()
            })
            .collect();
        GridFunction2D::new(q, p, rows.into_iter().flatten().collect())
    }

    /// Single-point version of [`fourier_grid`](Self::fourier_grid).
    pub fn fourier_at(&self, q: f64, p: f64) -> Complex64 {
        let (mu, nu) = (self.mu(), self.nu());
        let (nm, nn) = (mu.len(), nu.len());
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..nm {
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..nn {
                row += self.values.at(i, k) * Complex64::from_polar(trapezoid_weight(k, nn), -nu.point(k) * p);
            }
            sum += row * Complex64::from_polar(trapezoid_weight(i, nm), -mu.point(i) * q);
        }
        sum * (mu.step() * nu.step())
    }
}

/// Characteristic function on a symmetric `mu` grid for a list of fixed
/// `nu` values, the input of the density-matrix reconstruction.
#[derive(Debug, Clone)]
pub struct NuSlices {
    pub mu: UniformGrid,
    pub nus: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
}

impl NuSlices {
    pub fn build<F>(mu: UniformGrid, nus: Vec<f64>, tomogram: F) -> Result<Self>
    where
        F: Fn(TomographyFrame) -> Result<Tomogram> + Sync,
    {
        if !mu.is_symmetric() {
            return Err(TomoError::InvalidArgument("mu grid must be symmetric about the origin".into()));
        }
        let values = nus
            .par_iter()
            .map(|&nu| {
                (0..mu.len())
                    .map(|i| {
                        let f = TomographyFrame::new(mu.point(i), nu);
                        if f.is_zero() {
                            Ok(Complex64::new(1.0, 0.0))
                        } else {
                            characteristic(&tomogram(f)?)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NuSlices { mu, nus, values })
    }

    /// The slice whose `nu` matches to a relative tolerance of `1e-9`.
    pub fn slice(&self, nu: f64) -> Result<&[Complex64]> {
        let tol = 1e-9 * nu.abs().max(1.0);
        self.nus
            .iter()
            .position(|&v| (v - nu).abs() <= tol)
            .map(|k| self.values[k].as_slice())
            .ok_or(TomoError::MissingNuSlice { nu })
    }

    /// `Δmu <= π / x_half` for centres `(x + x') / 2` in `[-x_half, x_half]`.
    pub fn check_nyquist(&self, x_half: f64) -> Result<()> {
        let limit = PI / x_half;
        if self.mu.step() > limit {
            return Err(TomoError::Nyquist {
                axis: "mu",
                spacing: self.mu.step(),
                limit,
            });
        }
        Ok(())
    }

    /// `∫ C(mu, nu) e^{-i mu c} dmu` on the slice `nu`.
    pub fn fourier_mu(&self, nu: f64, c: f64) -> Result<Complex64> {
        let row = self.slice(nu)?;
        let n = self.mu.len();
        let sum: Complex64 = row
            .iter()
            .enumerate()
            .map(|(i, v)| v * Complex64::from_polar(trapezoid_weight(i, n), -self.mu.point(i) * c))
            .sum();
        Ok(sum * self.mu.step())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_tomogram(frame: TomographyFrame) -> Result<Tomogram> {
        // isotropic unit-variance density: W is N(0, mu² + nu²)
        let var = frame.mu * frame.mu + frame.nu * frame.nu;
        let half = 10.0 * var.sqrt();
        let grid = UniformGrid::with_max_step(-half, half, 0.02)?;
        Tomogram::from_fn(frame, grid, |x| (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
    }

    #[test]
    fn characteristic_of_gaussian() {
        let t = gaussian_tomogram(TomographyFrame::new(1.0, 0.5)).unwrap();
        let c = characteristic(&t).unwrap();
        assert!((c.re - (-1.25f64 / 2.0).exp()).abs() < 1e-10);
        assert!(c.im.abs() < 1e-12);
    }

    #[test]
    fn coarse_x_grid_is_rejected() {
        let g = UniformGrid::new(-5.0, 5.0, 5).unwrap();
        let t = Tomogram::from_fn(TomographyFrame::POSITION, g, |_| 0.1).unwrap();
        assert!(matches!(characteristic(&t), Err(TomoError::Nyquist { .. })));
    }

    #[test]
    fn fourier_grid_matches_pointwise() {
        let m = UniformGrid::symmetric(6.0, 25).unwrap();
        let table = CharacteristicTable::build(m, m, gaussian_tomogram).unwrap();
        let q = UniformGrid::new(-1.0, 1.0, 3).unwrap();
        let p = UniformGrid::new(-0.5, 0.5, 2).unwrap();
        let grid = table.fourier_grid(q, p).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let d = grid.at(i, j) - table.fourier_at(q.point(i), p.point(j));
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn missing_slice_names_nu() {
        let m = UniformGrid::symmetric(4.0, 17).unwrap();
        let s = NuSlices::build(m, vec![0.0, 0.5], gaussian_tomogram).unwrap();
        assert!(s.slice(0.5).is_ok());
        match s.slice(0.25) {
            Err(TomoError::MissingNuSlice { nu }) => assert_eq!(nu, 0.25),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nyquist_limit() {
        let m = UniformGrid::symmetric(4.0, 9).unwrap();
        let table = CharacteristicTable::build(m, m, gaussian_tomogram).unwrap();
        assert!(table.check_nyquist(3.0, 3.0).is_ok());
        assert!(matches!(table.check_nyquist(5.0, 3.0), Err(TomoError::Nyquist { axis: "mu", .. })));
    }
}
