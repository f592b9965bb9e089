use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::StateSpec;
use crate::classical::InverseValue;
use crate::error::{Result, TomoError};
use crate::phase::radon::line_integral;
use crate::phase::{CharacteristicTable, GridFunction2D, NuSlices, Tomogram, TomographyFrame, UniformGrid};

/// Largest Hermiticity residual accepted for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-6;

/// `ρ(x, x') = ψ(x) ψ*(x')` on `grid × grid`.
pub fn density_matrix(state: &StateSpec, grid: UniformGrid) -> Result<GridFunction2D<Complex64>> {
    let psi = grid.points().into_iter().map(|x| state.psi(x)).collect::<Result<Vec<_>>>()?;
    let n = grid.len();
    let values = (0..n * n).map(|k| psi[k / n] * psi[k % n].conj()).collect();
    GridFunction2D::new(grid, grid, values)
}

fn check_hermitian(rho: &GridFunction2D<Complex64>) -> Result<()> {
    let residual = rho.hermiticity_residual()?;
    if residual > HERMITIAN_TOL {
        return Err(TomoError::NonHermitian { residual });
    }
    Ok(())
}

/// `∫ ρ(q + u/2, q - u/2) e^{-ipu/ħ} du` without the Hermiticity check.
fn wigner_integral(rho: &GridFunction2D<Complex64>, p: f64, q: f64, hbar: f64) -> Result<Complex64> {
    let (a, b) = (&rho.first, &rho.second);
    let reach = (q - a.min).min(a.max - q).min(q - b.min).min(b.max - q);
    if !(reach >= 0.0) {
        return Err(TomoError::InvalidArgument(format!("q = {q} lies outside the density-matrix grid")));
    }
    // u runs over [-2 reach, 2 reach]; each argument moves by du/2
    let du = a.step().min(b.step());
    let half = (2.0 * reach / du).floor() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -half..=half {
        let u = k as f64 * du;
        let w = if k.abs() == half { 0.5 } else { 1.0 };
        sum += rho.interpolate(q + 0.5 * u, q - 0.5 * u) * Complex64::from_polar(w, -p * u / hbar);
    }
    Ok(sum * du)
}

/// Wigner function `W(p, q) = ∫ ρ(q + u/2, q - u/2) e^{-ipu/ħ} du` by the
/// trapezoid rule with bilinear interpolation of `ρ`. The `u` range is the
/// part of the anti-diagonal through `(q, q)` that stays on the grid.
pub fn wigner_from_density(rho: &GridFunction2D<Complex64>, p: f64, q: f64, hbar: f64) -> Result<InverseValue> {
    check_hermitian(rho)?;
    let v = wigner_integral(rho, p, q, hbar)?;
    Ok(InverseValue {
        value: v.re,
        imaginary: v.im,
    })
}

/// [`wigner_from_density`] on a `(q, p)` grid. Returns `W` with `q` as the
/// first axis and the largest imaginary residual.
pub fn wigner_grid_from_density(
    rho: &GridFunction2D<Complex64>,
    q: UniformGrid,
    p: UniformGrid,
    hbar: f64,
) -> Result<(GridFunction2D<f64>, f64)> {
    check_hermitian(rho)?;
    let vals = (0..q.len() * p.len())
        .into_par_iter()
        .map(|k| wigner_integral(rho, p.point(k % p.len()), q.point(k / p.len()), hbar))
        .collect::<Result<Vec<_>>>()?;
    let imaginary = vals.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    Ok((GridFunction2D::new(q, p, vals.iter().map(|v| v.re).collect())?, imaginary))
}

/// `(1/(2πħ)) ∫∫ W(p, q) δ(X - mu q - nu p) dp dq` by the line-integral
/// scheme of the classical transform; `w` has `q` as its first axis. The
/// frame `(0, 0)` gives the atom `δ(X)`. Quadrature can leave small
/// negative samples where the tomogram vanishes; they are set to zero.
pub fn tomogram_from_wigner(w: &GridFunction2D<f64>, frame: TomographyFrame, x_grid: UniformGrid, hbar: f64) -> Result<Tomogram> {
    if frame.is_zero() {
        return Ok(Tomogram::point_mass(frame, x_grid, 0.0));
    }
    let step = 0.5 * w.first.step().min(w.second.step());
    let scale = 1.0 / (2.0 * PI * hbar);
    let values: Vec<f64> = (0..x_grid.len())
        .into_par_iter()
        .map(|i| (line_integral(w, frame, x_grid.point(i), step) * scale).max(0.0))
        .collect();
    Tomogram::new(frame, x_grid, values, Vec::new())
}

/// `W(p, q) = (ħ/2π) ∫ W(X, mu, nu) e^{i(X - mu q - nu p)} dX dmu dnu` from a
/// characteristic table; `support` is the declared `(q_half, p_half)`.
pub fn wigner_from_tomogram(table: &CharacteristicTable, p: f64, q: f64, hbar: f64, support: (f64, f64)) -> Result<InverseValue> {
    table.check_nyquist(support.0, support.1)?;
    let v = table.fourier_at(q, p) * (hbar / (2.0 * PI));
    Ok(InverseValue {
        value: v.re,
        imaginary: v.im,
    })
}

/// [`wigner_from_tomogram`] on a `(q, p)` grid, with the largest imaginary
/// residual.
pub fn wigner_grid_from_tomogram(
    table: &CharacteristicTable,
    q: UniformGrid,
    p: UniformGrid,
    hbar: f64,
    support: (f64, f64),
) -> Result<(GridFunction2D<f64>, f64)> {
    table.check_nyquist(support.0, support.1)?;
    let c = table.fourier_grid(q, p)?;
    let scale = hbar / (2.0 * PI);
    let imaginary = c.values.iter().fold(0.0f64, |m, v| m.max((v.im * scale).abs()));
    Ok((
        GridFunction2D::new(q, p, c.values.iter().map(|v| v.re * scale).collect())?,
        imaginary,
    ))
}

/// The `nu = (x - x')/ħ` slices needed for a density matrix on `grid × grid`.
pub fn required_nu_slices(grid: &UniformGrid, hbar: f64) -> Vec<f64> {
    let n = grid.len() as i64;
    (-(n - 1)..n).map(|k| k as f64 * grid.step() / hbar).collect()
}

/// `ρ(x, x') = (1/2π) ∫ W(X, mu, (x - x')/ħ) e^{i(X - mu (x + x')/2)} dX dmu`.
/// `x_half` bounds `|x + x'|/2` for the Nyquist check on the `mu` grid.
pub fn density_from_tomogram(slices: &NuSlices, x: f64, xprime: f64, hbar: f64, x_half: f64) -> Result<Complex64> {
    slices.check_nyquist(x_half)?;
    Ok(slices.fourier_mu((x - xprime) / hbar, 0.5 * (x + xprime))? / (2.0 * PI))
}

/// [`density_from_tomogram`] on `grid × grid`, with the Hermiticity residual
/// of the result.
pub fn density_grid_from_tomogram(slices: &NuSlices, grid: UniformGrid, hbar: f64) -> Result<(GridFunction2D<Complex64>, f64)> {
    let x_half = grid.min.abs().max(grid.max.abs());
    slices.check_nyquist(x_half)?;
    let n = grid.len();
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let nu = (i as f64 - j as f64) * grid.step() / hbar;
            Ok(slices.fourier_mu(nu, 0.5 * (grid.point(i) + grid.point(j)))? / (2.0 * PI))
        })
        .collect::<Result<Vec<_>>>()?;
    let rho = GridFunction2D::new(grid, grid, values)?;
    let residual = rho.hermiticity_residual()?;
    Ok((rho, residual))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::quantum::{coherent_tomogram, hermite_tomogram, tomogram_from_wavefunction};

    fn ground_rho(half: f64, n: usize) -> GridFunction2D<Complex64> {
        density_matrix(&StateSpec::ho(0, 1.0).unwrap(), UniformGrid::symmetric(half, n).unwrap()).unwrap()
    }

    #[test]
    fn ground_state_wigner_is_gaussian() {
        // ∫ π^{-1/2} e^{-q² - u²/4} e^{-ipu} du = 2 e^{-q² - p²}
        let rho = ground_rho(7.0, 281);
        for (p, q) in [(0.0, 0.0), (0.5, -0.3), (-1.2, 0.8)] {
            let w = wigner_from_density(&rho, p, q, 1.0).unwrap();
            let exact = 2.0 * (-(q * q) - p * p).exp();
            assert!((w.value - exact).abs() < 1e-3, "({p}, {q}): {} vs {exact}", w.value);
            assert!(w.imaginary.abs() < 1e-8);
            let mirrored = wigner_from_density(&rho, -p, q, 1.0).unwrap();
            assert!((mirrored.value - w.value).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_normalisation_is_the_trace() {
        let rho = ground_rho(6.0, 121);
        let g = UniformGrid::symmetric(5.0, 101).unwrap();
        let (w, imag) = wigner_grid_from_density(&rho, g, g, 1.0).unwrap();
        assert!(imag < 1e-8);
        assert!((w.integrate() / (2.0 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let mut rho = ground_rho(4.0, 41);
        rho.values[5] += Complex64::new(0.0, 1e-3);
        assert!(matches!(
            wigner_from_density(&rho, 0.0, 0.0, 1.0),
            Err(TomoError::NonHermitian { .. })
        ));
    }

    #[test]
    fn wigner_route_matches_wave_function_route() {
        let hbar = 1.0;
        let s = StateSpec::ho(0, hbar).unwrap();
        let rho = density_matrix(&s, UniformGrid::symmetric(7.0, 281).unwrap()).unwrap();
        let g = UniformGrid::symmetric(6.0, 121).unwrap();
        let (w, _) = wigner_grid_from_density(&rho, g, g, hbar).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut next = || rng.gen::<f64>();
        for _ in 0..100 {
            let f = TomographyFrame::from_scaling(0.5 + next(), PI * next()).unwrap();
            let x = 3.0 * (2.0 * next() - 1.0);
            let xg = UniformGrid::new(x, x + 1.0, 2).unwrap();
            let a = tomogram_from_wigner(&w, f, xg, hbar).unwrap().values()[0];
            let b = tomogram_from_wavefunction(&s, f, xg).unwrap().values()[0];
            assert!((a - b).abs() < 1e-3, "{f:?} X = {x}: {a} vs {b}");
        }
        let t = tomogram_from_wigner(&w, TomographyFrame::new(0.0, 0.0), g, hbar).unwrap();
        assert_eq!(t.atoms()[0].weight, 1.0);
        let t = tomogram_from_wigner(&w, TomographyFrame::new(0.8, 0.6), UniformGrid::symmetric(6.0, 241).unwrap(), hbar).unwrap();
        assert!(t.normalization_residual().unwrap() < 1e-3);
    }

    fn closed_table(n: usize, hbar: f64) -> CharacteristicTable {
        let m = UniformGrid::symmetric(8.0, 33).unwrap();
        CharacteristicTable::build(m, m, |f| {
            let half = 12.0 * f.norm().max(0.1) * hbar.sqrt() + 1.0;
            let g = UniformGrid::with_max_step(-half, half, 0.05)?;
            Tomogram::from_fn(f, g, |x| hermite_tomogram(n, f, x, hbar, 1.0).unwrap())
        })
        .unwrap()
    }

    #[test]
    fn ground_state_wigner_from_tomograms() {
        let table = closed_table(0, 1.0);
        for (p, q) in [(0.0, 0.0), (0.7, 0.2), (-1.0, -1.1)] {
            let w = wigner_from_tomogram(&table, p, q, 1.0, (3.5, 3.5)).unwrap();
            let exact = 2.0 * (-(q * q) - p * p).exp();
            assert!((w.value - exact).abs() < 1e-3, "({p}, {q}): {} vs {exact}", w.value);
            assert!(w.imaginary.abs() < 1e-6);
        }
    }

    #[test]
    fn first_excited_state_is_negative_at_origin() {
        // W_1 = 2 (2(q² + p²)/ħ - 1) e^{-(q² + p²)/ħ}
        let table = closed_table(1, 1.0);
        let w0 = wigner_from_tomogram(&table, 0.0, 0.0, 1.0, (3.5, 3.5)).unwrap().value;
        assert!(w0 < 0.0 && (w0 + 2.0).abs() < 1e-3, "{w0}");
        let (q, p) = (1.0, 0.5);
        let w = wigner_from_tomogram(&table, p, q, 1.0, (3.5, 3.5)).unwrap().value;
        let r2 = q * q + p * p;
        assert!((w - 2.0 * (2.0 * r2 - 1.0) * (-r2).exp()).abs() < 1e-3);
    }

    #[test]
    fn wigner_inverse_is_linear() {
        let (a, b) = (closed_table(0, 1.0), closed_table(2, 1.0));
        let mut mix = a.clone();
        for (v, w) in mix.values.values.iter_mut().zip(&b.values.values) {
            *v = 0.3 * *v + 0.7 * w;
        }
        let f = |t: &CharacteristicTable| wigner_from_tomogram(t, 0.4, -0.6, 1.0, (3.5, 3.5)).unwrap().value;
        assert!((f(&mix) - 0.3 * f(&a) - 0.7 * f(&b)).abs() < 1e-12);
    }

    #[test]
    fn coherent_density_matrix_round_trip() {
        let (hbar, alpha) = (1.0, Complex64::new(0.5, -0.3));
        let s = StateSpec::coherent(alpha, hbar).unwrap();
        let grid = UniformGrid::symmetric(3.0, 13).unwrap();
        let mu = UniformGrid::symmetric(10.0, 81).unwrap();
        let slices = NuSlices::build(mu, required_nu_slices(&grid, hbar), |f| {
            let half = 10.0 * f.norm() + 4.0;
            let g = UniformGrid::with_max_step(-half, half, 0.05)?;
            Tomogram::from_fn(f, g, |x| coherent_tomogram(alpha, f, x, hbar, 1.0).unwrap())
        })
        .unwrap();
        let (rho, residual) = density_grid_from_tomogram(&slices, grid, hbar).unwrap();
        assert!(residual < 1e-6);
        let mut err: f64 = 0.0;
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                let exact = s.psi(grid.point(i)).unwrap() * s.psi(grid.point(j)).unwrap().conj();
                err = err.max((rho.at(i, j) - exact).norm());
            }
        }
        assert!(err < 1e-3, "{err}");
        let diag: Vec<f64> = (0..grid.len()).map(|i| rho.at(i, i).re).collect();
        for (i, d) in diag.iter().enumerate() {
            assert!((d - s.psi(grid.point(i)).unwrap().norm_sqr()).abs() < 1e-3);
        }
        let point = density_from_tomogram(&slices, grid.point(2), grid.point(9), hbar, 3.0).unwrap();
        assert!((point - rho.at(2, 9)).norm() < 1e-12);
        assert!(matches!(
            density_from_tomogram(&slices, 0.1, 0.0, hbar, 3.0),
            Err(TomoError::MissingNuSlice { .. })
        ));
    }

    #[test]
    fn reconstructed_trace_is_one() {
        let hbar = 0.5;
        let grid = UniformGrid::symmetric(3.0, 61).unwrap();
        let mu = UniformGrid::symmetric(12.0, 97).unwrap();
        let slices = NuSlices::build(mu, vec![0.0], |f| {
            let half = 8.0 * f.norm() + 3.0;
            let g = UniformGrid::with_max_step(-half, half, 0.05)?;
            Tomogram::from_fn(f, g, |x| hermite_tomogram(2, f, x, hbar, 1.0).unwrap())
        })
        .unwrap();
        let diag: Vec<f64> = grid
            .points()
            .into_iter()
            .map(|x| density_from_tomogram(&slices, x, x, hbar, 3.0).unwrap().re)
            .collect();
        let trace = crate::phase::tomogram::trapezoid(&diag, grid.step());
        assert!((trace - 1.0).abs() < 1e-3, "{trace}");
    }
}
