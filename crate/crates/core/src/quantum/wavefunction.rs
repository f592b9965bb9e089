use std::f64::consts::PI;

use rayon::prelude::*;

use super::amplitude::{momentum_amplitude, position_amplitude};
use super::closed_form::{cat_tomogram, coherent_tomogram, hermite_tomogram, superposition_tomogram};
use super::state::{StateKind, StateSpec};
use crate::error::{Result, TomoError};
use crate::phase::{Tomogram, TomographyFrame, UniformGrid};

/// Largest mass a custom-state tomogram may lose outside its X grid.
pub const CUSTOM_MASS_TOL: f64 = 1e-3;

/// Which representation evaluates the tomogram at a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `|ψ(X/mu)|² / |mu|` at `nu = 0`.
    PositionMarginal,
    /// `|ψ̂(X/nu)|² / |nu|` at `mu = 0`.
    MomentumMarginal,
    /// `|A_ψ|² / (2πħ|nu|)` from the position wave function.
    Position,
    /// `|B_ψ|² / (2πħ|mu|)` from the momentum wave function.
    Momentum,
}

/// Position representation when `|nu| P >= |mu| Q` for the state's natural
/// scales `(Q, P)`, momentum otherwise. The box always uses the position
/// representation: its momentum tails fall off only like `p⁻⁴`.
pub fn representation(state: &StateSpec, frame: TomographyFrame) -> Result<Representation> {
    if frame.is_zero() {
        return Err(TomoError::ZeroFrame);
    }
    if frame.nu == 0.0 {
        return Ok(Representation::PositionMarginal);
    }
    if frame.mu == 0.0 {
        return Ok(Representation::MomentumMarginal);
    }
    if matches!(state.kind, StateKind::BoxEigen { .. }) {
        return Ok(Representation::Position);
    }
    let (q, p) = state.scales();
    Ok(if frame.nu.abs() * p >= frame.mu.abs() * q {
        Representation::Position
    } else {
        Representation::Momentum
    })
}

/// Tomogram density at one point of a non-zero frame.
pub fn wavefunction_tomogram_value(state: &StateSpec, frame: TomographyFrame, x: f64) -> Result<f64> {
    let hbar = state.hbar;
    Ok(match representation(state, frame)? {
        Representation::PositionMarginal => state.psi(x / frame.mu)?.norm_sqr() / frame.mu.abs(),
        Representation::MomentumMarginal => state.psi_hat(x / frame.nu)?.norm_sqr() / frame.nu.abs(),
        Representation::Position => position_amplitude(state, frame, x)?.norm_sqr() / (2.0 * PI * hbar * frame.nu.abs()),
        Representation::Momentum => momentum_amplitude(state, frame, x)?.norm_sqr() / (2.0 * PI * hbar * frame.mu.abs()),
    })
}

/// Tomogram of a pure state on `x_grid`, evaluated point-parallel. The frame
/// `(0, 0)` gives the atom `δ(X)`. For custom states the grid must hold all
/// but [`CUSTOM_MASS_TOL`] of the mass.
pub fn tomogram_from_wavefunction(state: &StateSpec, frame: TomographyFrame, x_grid: UniformGrid) -> Result<Tomogram> {
    if frame.is_zero() {
        return Ok(Tomogram::point_mass(frame, x_grid, 0.0));
    }
    let values = (0..x_grid.len())
        .into_par_iter()
        .map(|i| wavefunction_tomogram_value(state, frame, x_grid.point(i)))
        .collect::<Result<Vec<_>>>()?;
    let t = Tomogram::new(frame, x_grid, values, Vec::new())?;
    if matches!(state.kind, StateKind::CustomGrid(_)) {
        let deficit = 1.0 - t.mass();
        if deficit.abs() > CUSTOM_MASS_TOL {
            return Err(TomoError::MassDeficit { deficit });
        }
    }
    Ok(t)
}

/// Tomogram of a pure state on `x_grid`: the closed forms for the oscillator
/// family, [`tomogram_from_wavefunction`] for every other state.
pub fn state_tomogram(state: &StateSpec, frame: TomographyFrame, x_grid: UniformGrid) -> Result<Tomogram> {
    if frame.is_zero() {
        return Ok(Tomogram::point_mass(frame, x_grid, 0.0));
    }
    if matches!(state.kind, StateKind::BoxEigen { .. } | StateKind::CustomGrid(_)) {
        return tomogram_from_wavefunction(state, frame, x_grid);
    }
    let h = state.hbar;
    let value = |x: f64| -> Result<f64> {
        match &state.kind {
            StateKind::HoEigen { n, varpi } => hermite_tomogram(*n, frame, x, h, *varpi),
            StateKind::Coherent { alpha, varpi } => coherent_tomogram(*alpha, frame, x, h, *varpi),
            StateKind::Cat { alpha, parity, varpi } => cat_tomogram(*alpha, *parity, frame, x, h, *varpi),
            StateKind::Superposition { n, m, varpi } => superposition_tomogram(*n, *m, frame, x, h, *varpi),
            StateKind::BoxEigen { .. } | StateKind::CustomGrid(_) => unreachable!(),
        }
    };
    let values = (0..x_grid.len())
        .into_par_iter()
        .map(|i| value(x_grid.point(i)))
        .collect::<Result<Vec<_>>>()?;
    Tomogram::new(frame, x_grid, values, Vec::new())
}
