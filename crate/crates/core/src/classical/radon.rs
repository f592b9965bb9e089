use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Result, TomoError};
use crate::phase::radon::line_integral;
use crate::phase::{CharacteristicTable, GridFunction2D, Tomogram, TomographyFrame, UniformGrid};

/// Largest mass the X grid may lose before the transform is refused.
const X_MASS_TOL: f64 = 1e-3;

/// `W(X) = ∫∫ f(q, p) δ(X - mu q - nu p) dq dp` on `x_grid`.
///
/// Each sample is a line integral along `mu q + nu p = X` with half the
/// smaller grid spacing as step. Refuses the zero frame, a density that is
/// not normalised on its own grid, and an X grid that loses more than
/// `1e-3` of the projected mass.
pub fn radon_density(f: &GridFunction2D<f64>, frame: TomographyFrame, x_grid: UniformGrid) -> Result<Tomogram> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    let total = f.integrate();
    if (total - 1.0).abs() > X_MASS_TOL {
        return Err(TomoError::MassDeficit { deficit: 1.0 - total });
    }
    let step = 0.5 * f.first.step().min(f.second.step());
    let values: Vec<f64> = (0..x_grid.len())
        .into_par_iter()
        .map(|i| line_integral(f, frame, x_grid.point(i), step))
        .collect();
    let t = Tomogram::new(frame, x_grid, values, Vec::new())?;
    let deficit = total - t.mass();
    if deficit > X_MASS_TOL {
        return Err(TomoError::MassDeficit { deficit });
    }
    Ok(t)
}

/// X grid covering the projection of the whole `(q, p)` rectangle, with a
/// spacing of `base_step * max(|frame|, 1)` so every frame of a family gets
/// the same number of samples per tomogram width.
pub fn projected_x_grid(f: &GridFunction2D<f64>, frame: TomographyFrame, base_step: f64) -> Result<UniformGrid> {
    let q = [f.first.min, f.first.max];
    let p = [f.second.min, f.second.max];
    let half = q
        .iter()
        .flat_map(|qv| p.iter().map(move |pv| frame.project(*qv, *pv).abs()))
        .fold(0.0, f64::max);
    UniformGrid::with_max_step(-half, half, base_step * frame.norm().max(1.0))
}

/// Inverse transform at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseValue {
    pub value: f64,
    /// Imaginary part of the triple integral, zero for exact real input.
    pub imaginary: f64,
}

/// `f(q, p) = (2π)^{-2} ∫∫∫ W(X, mu, nu) e^{i(X - mu q - nu p)} dX dmu dnu`.
///
/// `support` is the declared half-width `(q_half, p_half)` of the density;
/// the frame spacing must satisfy the Nyquist condition for it.
pub fn inverse_radon(table: &CharacteristicTable, q: f64, p: f64, support: (f64, f64)) -> Result<InverseValue> {
    table.check_nyquist(support.0, support.1)?;
    let v = table.fourier_at(q, p) / (4.0 * PI * PI);
    Ok(InverseValue {
        value: v.re,
        imaginary: v.im,
    })
}

/// [`inverse_radon`] on a `(q, p)` grid; returns the real part and the
/// largest imaginary residual.
pub fn inverse_radon_grid(
    table: &CharacteristicTable,
    q: UniformGrid,
    p: UniformGrid,
    support: (f64, f64),
) -> Result<(GridFunction2D<f64>, f64)> {
    table.check_nyquist(support.0, support.1)?;
    let c = table.fourier_grid(q, p)?;
    let scale = 1.0 / (4.0 * PI * PI);
    let imaginary = c.values.iter().fold(0.0f64, |m, v| m.max((v.im * scale).abs()));
    let values = c.values.iter().map(|v| v.re * scale).collect();
    Ok((GridFunction2D::new(q, p, values)?, imaginary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ClassicalModel;

    fn gaussian_density(sq: f64, sp: f64, half: f64, n: usize) -> GridFunction2D<f64> {
        let g = UniformGrid::symmetric(half, n).unwrap();
        GridFunction2D::from_fn(g, g, |q, p| {
            (-q * q / (2.0 * sq * sq) - p * p / (2.0 * sp * sp)).exp() / (2.0 * PI * sq * sp)
        })
        .unwrap()
    }

    #[test]
    fn gaussian_projection_adds_variances() {
        let (sq, sp) = (0.8, 1.3);
        let f = gaussian_density(sq, sp, 8.0, 321);
        let frame = TomographyFrame::new(1.0, 1.0);
        let grid = projected_x_grid(&f, frame, 0.05).unwrap();
        let t = radon_density(&f, frame, grid).unwrap();
        let var = sq * sq + sp * sp;
        for i in (0..grid.len()).step_by(37) {
            let x = grid.point(i);
            let exact = (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
            assert!((t.values()[i] - exact).abs() < 2e-4, "X = {x}");
        }
        assert!(t.normalization_residual().unwrap() < 1e-3);
    }

    #[test]
    fn axis_frames_give_marginals() {
        let f = gaussian_density(0.7, 1.1, 7.0, 281);
        let g = UniformGrid::symmetric(6.0, 241).unwrap();
        let tq = radon_density(&f, TomographyFrame::POSITION, g).unwrap();
        let tp = radon_density(&f, TomographyFrame::MOMENTUM, g).unwrap();
        let other = f.second;
        let n = other.len();
        let marginal = |cut: &dyn Fn(f64) -> f64| {
            (0..n)
                .map(|k| cut(other.point(k)) * if k == 0 || k + 1 == n { 0.5 } else { 1.0 })
                .sum::<f64>()
                * other.step()
        };
        for i in (0..g.len()).step_by(20) {
            let x = g.point(i);
            let mq = marginal(&|p| f.interpolate(x, p));
            let mp = marginal(&|q| f.interpolate(q, x));
            assert!((tq.values()[i] - mq).abs() < 1e-4, "q marginal at {x}");
            assert!((tp.values()[i] - mp).abs() < 1e-4, "p marginal at {x}");
        }
    }

    #[test]
    fn homogeneity() {
        let f = gaussian_density(0.9, 1.2, 8.0, 321);
        let frame = TomographyFrame::new(0.6, -0.4);
        for lambda in [-2.0f64, 0.5, 3.0] {
            let g = UniformGrid::new(-1.0, 1.0, 5).unwrap();
            let t = radon_density_unchecked(&f, frame, g);
            let gs = UniformGrid::new(-lambda.abs(), lambda.abs(), 5).unwrap();
            let ts = radon_density_unchecked(&f, frame.scaled(lambda), gs);
            for (i, ti) in t.iter().enumerate() {
                let j = if lambda < 0.0 { 4 - i } else { i };
                let d = ts[j] - ti / lambda.abs();
                assert!(d.abs() < 1e-6, "λ = {lambda}, i = {i}: {d}");
            }
        }
    }

    fn radon_density_unchecked(f: &GridFunction2D<f64>, frame: TomographyFrame, g: UniformGrid) -> Vec<f64> {
        let step = 0.5 * f.first.step().min(f.second.step());
        g.points().into_iter().map(|x| line_integral(f, frame, x, step)).collect()
    }

    #[test]
    fn zero_frame_and_truncated_support_rejected() {
        let f = gaussian_density(1.0, 1.0, 8.0, 161);
        let g = UniformGrid::symmetric(5.0, 101).unwrap();
        assert!(matches!(
            radon_density(&f, TomographyFrame::new(0.0, 0.0), g),
            Err(TomoError::ZeroFrame)
        ));
        let narrow = UniformGrid::symmetric(1.0, 101).unwrap();
        assert!(matches!(
            radon_density(&f, TomographyFrame::POSITION, narrow),
            Err(TomoError::MassDeficit { .. })
        ));
        let wide = gaussian_density(3.0, 1.0, 5.0, 161);
        assert!(ClassicalModel::density_grid(wide).is_err());
    }

    fn family(f: &GridFunction2D<f64>, k: f64, n: usize) -> CharacteristicTable {
        let m = UniformGrid::symmetric(k, n).unwrap();
        CharacteristicTable::build(m, m, |fr| radon_density(f, fr, projected_x_grid(f, fr, 0.05)?)).unwrap()
    }

    #[test]
    fn round_trip_standard_gaussian() {
        let f = gaussian_density(1.0, 1.0, 6.0, 241);
        let table = family(&f, 6.0, 25);
        let g = UniformGrid::symmetric(3.0, 13).unwrap();
        let (rec, imaginary) = inverse_radon_grid(&table, g, g, (6.0, 6.0)).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..g.len() {
            for j in 0..g.len() {
                let exact = f.interpolate(g.point(i), g.point(j));
                err = err.max((rec.at(i, j) - exact).abs());
            }
        }
        assert!(err < 1e-3, "{err}");
        assert!(imaginary < 1e-6, "{imaginary}");
        let single = inverse_radon(&table, g.point(3), g.point(5), (6.0, 6.0)).unwrap();
        assert!((single.value - rec.at(3, 5)).abs() < 1e-12);
    }

    #[test]
    fn inverse_is_linear() {
        let f1 = gaussian_density(1.0, 1.0, 6.0, 121);
        let f2 = gaussian_density(0.7, 1.3, 6.0, 121);
        let (t1, t2) = (family(&f1, 5.0, 21), family(&f2, 5.0, 21));
        let mut avg = t1.clone();
        for (v, w) in avg.values.values.iter_mut().zip(&t2.values.values) {
            *v = (*v + w) / 2.0;
        }
        let a = inverse_radon(&avg, 0.4, -0.2, (6.0, 6.0)).unwrap().value;
        let b = inverse_radon(&t1, 0.4, -0.2, (6.0, 6.0)).unwrap().value;
        let c = inverse_radon(&t2, 0.4, -0.2, (6.0, 6.0)).unwrap().value;
        assert!((a - (b + c) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn coarse_family_violates_nyquist() {
        let f = gaussian_density(1.0, 1.0, 6.0, 61);
        let table = family(&f, 6.0, 7);
        assert!(matches!(
            inverse_radon(&table, 0.0, 0.0, (6.0, 6.0)),
            Err(TomoError::Nyquist { .. })
        ));
    }
}
