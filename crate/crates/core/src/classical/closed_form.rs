use std::f64::consts::PI;

use crate::error::{Result, TomoError};
use crate::phase::{DeltaAtom, Tomogram, TomographyFrame, UniformGrid};

fn in_box(q: f64, length: f64) -> bool {
    (0.0..=length).contains(&q)
}

/// Time-averaged box tomogram for energy `energy`,
/// `(1 / (2|mu| L)) [χ(Q⁻) + χ(Q⁺)]` with `Q∓ = X/mu ∓ √(2E) nu/mu`.
/// The indicator uses the closed interval `[0, L]`. Needs `mu != 0`.
pub fn classical_box_density(x: f64, frame: TomographyFrame, length: f64, energy: f64) -> Result<f64> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    if frame.mu == 0.0 {
        return Err(TomoError::InvalidArgument(
            "mu = 0: the box tomogram is a pair of delta atoms, use classical_box_tomogram_grid".into(),
        ));
    }
    let v = (2.0 * energy).sqrt();
    let (qm, qp) = ((x - v * frame.nu) / frame.mu, (x + v * frame.nu) / frame.mu);
    let count = in_box(qm, length) as u8 + in_box(qp, length) as u8;
    Ok(count as f64 / (2.0 * frame.mu.abs() * length))
}

/// The box tomogram at unit energy.
pub fn classical_box_tomogram(x: f64, frame: TomographyFrame, length: f64) -> Result<f64> {
    classical_box_density(x, frame, length, 1.0)
}

/// Exact box tomogram mass in `[a, b]` for `mu != 0`.
pub fn box_cell_mass(a: f64, b: f64, frame: TomographyFrame, length: f64, energy: f64) -> f64 {
    let v = (2.0 * energy).sqrt();
    let leg = |shift: f64| {
        // support of the leg in X: mu [0, L] + shift
        let (e1, e2) = (shift, shift + frame.mu * length);
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        (b.min(hi) - a.max(lo)).max(0.0)
    };
    (leg(-v * frame.nu) + leg(v * frame.nu)) / (2.0 * frame.mu.abs() * length)
}

/// Box tomogram sampled on a grid. Cells that contain a support edge carry
/// their exact cell-averaged mass; `mu = 0` yields atoms `½` at `±√(2E) nu`.
pub fn classical_box_tomogram_grid(frame: TomographyFrame, length: f64, energy: f64, grid: UniformGrid) -> Result<Tomogram> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    let v = (2.0 * energy).sqrt();
    if frame.mu == 0.0 {
        let atoms = vec![DeltaAtom::new(0.5, -v * frame.nu)?, DeltaAtom::new(0.5, v * frame.nu)?];
        return Tomogram::new(frame, grid, vec![0.0; grid.len()], atoms);
    }
    let edges = [
        -v * frame.nu,
        -v * frame.nu + frame.mu * length,
        v * frame.nu,
        v * frame.nu + frame.mu * length,
    ];
    let h = grid.step();
    let values = grid
        .points()
        .into_iter()
        .map(|x| {
            let (a, b) = (x - 0.5 * h, x + 0.5 * h);
            if edges.iter().any(|e| *e > a && *e < b) {
                Ok(box_cell_mass(a, b, frame, length, energy) / h)
            } else {
                classical_box_density(x, frame, length, energy)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Tomogram::new(frame, grid, values, Vec::new())
}

/// Radius `R = √(2E (mu² + nu²))` of the oscillator tomogram support.
pub fn oscillator_radius(frame: TomographyFrame, energy: f64) -> f64 {
    (2.0 * energy * (frame.mu * frame.mu + frame.nu * frame.nu)).sqrt()
}

/// Arcsine law `1 / (π √(R² - X²))` on `|X| < R`, zero outside. The value at
/// `|X| = R` is `+∞`, which marks the turning-point singularity.
pub fn classical_oscillator_tomogram(x: f64, frame: TomographyFrame, energy: f64) -> Result<f64> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    if !(energy > 0.0) {
        return Err(TomoError::InvalidArgument(format!("energy must be positive, got {energy}")));
    }
    let r = oscillator_radius(frame, energy);
    Ok(if x.abs() < r {
        1.0 / (PI * (r * r - x * x).sqrt())
    } else if x.abs() == r {
        f64::INFINITY
    } else {
        0.0
    })
}

/// Exact mass of the arcsine law in `[a, b]`.
pub fn oscillator_cell_mass(a: f64, b: f64, radius: f64) -> f64 {
    let cdf = |x: f64| 0.5 + (x / radius).clamp(-1.0, 1.0).asin() / PI;
    cdf(b) - cdf(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_position_marginal() {
        for &x in &[0.0, 0.3, 1.0] {
            assert_eq!(classical_box_tomogram(x, TomographyFrame::POSITION, 1.0).unwrap(), 1.0);
        }
        assert_eq!(classical_box_tomogram(1.01, TomographyFrame::POSITION, 1.0).unwrap(), 0.0);
        assert_eq!(classical_box_tomogram(-0.01, TomographyFrame::POSITION, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn box_momentum_marginal_is_two_atoms() {
        let g = UniformGrid::symmetric(3.0, 61).unwrap();
        let t = classical_box_tomogram_grid(TomographyFrame::MOMENTUM, 1.0, 1.0, g).unwrap();
        let s2 = 2f64.sqrt();
        assert_eq!(
            t.atoms(),
            &[
                DeltaAtom {
                    weight: 0.5,
                    location: -s2
                },
                DeltaAtom { weight: 0.5, location: s2 }
            ]
        );
        assert_eq!(t.normalization_residual().unwrap(), 0.0);
    }

    #[test]
    fn box_diagonal_frame_support() {
        // support [-√2, 1-√2] ∪ [√2, 1+√2] with density 1/2 on each piece
        let f = TomographyFrame::new(1.0, 1.0);
        let s2 = 2f64.sqrt();
        for (x, expected) in [(-s2 + 0.5, 0.5), (s2 + 0.5, 0.5), (0.0, 0.0), (-1.5, 0.0), (2.5, 0.0)] {
            assert_eq!(classical_box_tomogram(x, f, 1.0).unwrap(), expected, "X = {x}");
        }
    }

    #[test]
    fn box_grid_is_normalised() {
        let g = UniformGrid::new(-3.0, 4.0, 1401).unwrap();
        for f in [
            TomographyFrame::POSITION,
            TomographyFrame::new(1.0, 0.3),
            TomographyFrame::new(-0.7, 1.2),
        ] {
            let t = classical_box_tomogram_grid(f, 1.0, 1.0, g).unwrap();
            assert!(t.normalization_residual().unwrap() < 1e-12, "{f:?}");
        }
    }

    #[test]
    fn oscillator_values() {
        let f = TomographyFrame::POSITION;
        let v = classical_oscillator_tomogram(0.0, f, 1.0).unwrap();
        assert!((v - 1.0 / (2f64.sqrt() * PI)).abs() < 1e-15);
        assert_eq!(classical_oscillator_tomogram(1.5, f, 1.0).unwrap(), 0.0);
        assert!(classical_oscillator_tomogram(2f64.sqrt(), f, 1.0).unwrap().is_infinite());
        assert!(classical_oscillator_tomogram(0.0, TomographyFrame::new(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn oscillator_integral_is_one() {
        // substitution X = R sin u maps the integral to ∫ du / π over (-π/2, π/2)
        let r = oscillator_radius(TomographyFrame::POSITION, 1.0);
        let n = 200_000;
        let h = PI / n as f64;
        let mut sum = 0.0;
        for k in 0..n {
            let u = -PI / 2.0 + (k as f64 + 0.5) * h;
            let x = r * u.sin();
            sum += classical_oscillator_tomogram(x, TomographyFrame::POSITION, 1.0).unwrap() * r * u.cos() * h;
        }
        assert!((sum - 1.0).abs() < 1e-6, "{sum}");
        assert!((oscillator_cell_mass(-r, r, r) - 1.0).abs() < 1e-15);
    }
}
