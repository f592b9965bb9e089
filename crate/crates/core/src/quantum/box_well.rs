use std::f64::consts::PI;

use super::state::StateSpec;
use super::wavefunction::tomogram_from_wavefunction;
use crate::error::{Result, TomoError};
use crate::phase::{Tomogram, TomographyFrame, UniformGrid};

/// Tomogram of the box eigenstate `n` at general `hbar`. For `nu != 0` each
/// value is `(1/(2πħ|nu|)) (2/L) |(A₋ - A₊)/2i|²` with the two chirped
/// integrals evaluated by oscillatory quadrature; `nu = 0` and `mu = 0` use
/// the exact marginals. Refuses with the required node count when the
/// chirp cannot be resolved within the quadrature budget.
pub fn box_tomogram(n: usize, length: f64, frame: TomographyFrame, x_grid: UniformGrid, hbar: f64) -> Result<Tomogram> {
    tomogram_from_wavefunction(&StateSpec::box_eigen(n, length, hbar)?, frame, x_grid)
}

/// `ħ = √2 L / (nπ)`, which fixes the energy of level `n` to one.
pub fn box_unit_energy_hbar(n: usize, length: f64) -> f64 {
    2f64.sqrt() * length / (n as f64 * PI)
}

/// Stationary-phase form of the box tomogram at unit energy,
/// `[χ(Q⁻) + χ(Q⁺) - 2χ(Q⁻)χ(Q⁺) cos n(F₋(Q⁻) - F₊(Q⁺))] / (2|mu|L)` with
/// `Q∓ = X/mu ∓ √2 nu/mu` and `F∓(y) = (π/L)[mu y²/(2√2 nu) - (X/(√2 nu) ∓ 1) y]`.
pub fn box_tomogram_stationary_phase(n: usize, length: f64, frame: TomographyFrame, x: f64) -> Result<f64> {
    if frame.mu == 0.0 || frame.nu == 0.0 {
        return Err(TomoError::InvalidArgument("stationary phase needs mu != 0 and nu != 0".into()));
    }
    if n < 10 {
        return Err(TomoError::InvalidArgument(format!("stationary phase needs n >= 10, got {n}")));
    }
    if !(length > 0.0) {
        return Err(TomoError::InvalidArgument(format!("box length must be positive, got {length}")));
    }
    let (mu, nu) = (frame.mu, frame.nu);
    let s2 = 2f64.sqrt();
    let qm = (x - s2 * nu) / mu;
    let qp = (x + s2 * nu) / mu;
    let chi = |q: f64| (0.0..=length).contains(&q) as u8 as f64;
    let f = |y: f64, sign: f64| PI / length * (mu * y * y / (2.0 * s2 * nu) - (x / (s2 * nu) + sign) * y);
    let (cm, cp) = (chi(qm), chi(qp));
    let beat = (n as f64 * (f(qm, -1.0) - f(qp, 1.0))).cos();
    Ok((cm + cp - 2.0 * cm * cp * beat) / (2.0 * mu.abs() * length))
}
