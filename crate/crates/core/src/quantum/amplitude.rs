use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{cat_norm, Parity, StateKind, StateSpec};
use crate::error::{Result, TomoError};
use crate::phase::TomographyFrame;
use crate::quadrature::ChirpQuadrature;
use crate::special::hermite_phi;

/// `A_ψ(X, mu, nu) = ∫ ψ(y) e^{i mu y²/(2ħ nu) - i X y/(ħ nu)} dy` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomogramAmplitude {
    pub value: Complex64,
    pub frame: TomographyFrame,
    pub x: f64,
    pub hbar: f64,
}

impl TomogramAmplitude {
    /// `|A|² / (2πħ|nu|)`.
    pub fn density(&self) -> f64 {
        self.value.norm_sqr() / (2.0 * PI * self.hbar * self.frame.nu.abs())
    }
}

/// Quantities shared by the oscillator-family amplitudes at one point:
/// `ζ = varpi nu + i mu`, `u = ζ/|ζ|`, `κ = √(varpi/ħ)/|ζ|` and `Q = κX`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OscillatorPoint {
    pub zeta: Complex64,
    pub u: Complex64,
    pub kappa: f64,
    pub q: f64,
}

impl OscillatorPoint {
    pub fn new(frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<Self> {
        if frame.is_zero() {
            return Err(TomoError::ZeroFrame);
        }
        let zeta = Complex64::new(varpi * frame.nu, frame.mu);
        let kappa = (varpi / hbar).sqrt() / zeta.norm();
        Ok(OscillatorPoint {
            zeta,
            u: zeta / zeta.norm(),
            kappa,
            q: kappa * x,
        })
    }

    /// `(varpi/ħ)^{1/4} √(2πħ nu / ζ*) e^{-i mu Q²/(2 varpi nu)}`, the factor
    /// common to every oscillator-family amplitude. The square root is the
    /// principal branch; `nu/ζ*` stays in the right half-plane for either
    /// sign of `nu`, so the factor is continuous on each side of `nu = 0`.
    fn prefactor(&self, frame: TomographyFrame, hbar: f64, varpi: f64) -> Complex64 {
        let root = (Complex64::new(2.0 * PI * hbar * frame.nu, 0.0) / self.zeta.conj()).sqrt();
        let chirp = Complex64::from_polar(1.0, -frame.mu * self.q * self.q / (2.0 * varpi * frame.nu));
        (varpi / hbar).powf(0.25) * root * chirp
    }
}

fn require_nu(frame: TomographyFrame) -> Result<()> {
    if frame.nu == 0.0 {
        return Err(TomoError::InvalidArgument(
            "tomogram amplitudes need nu != 0; use the position representation for nu = 0".into(),
        ));
    }
    Ok(())
}

/// Generating function `J(s) = Σ sⁿ A_n / √n!`,
/// `J(s) = (varpi/πħ)^{1/4} √(2πħ nu/ζ*) exp[ζ s²/(2ζ*) - i √(2 varpi/ħ) X s/ζ* - X²/(2ħ nu ζ*)]`.
pub fn amplitude_generating(s: Complex64, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<Complex64> {
    require_nu(frame)?;
    let zeta = Complex64::new(varpi * frame.nu, frame.mu);
    let zc = zeta.conj();
    let root = (Complex64::new(2.0 * PI * hbar * frame.nu, 0.0) / zc).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let e = zeta * s * s / (2.0 * zc) - i * (2.0 * varpi / hbar).sqrt() * x * s / zc - x * x / (2.0 * hbar * frame.nu * zc);
    Ok((varpi / (PI * hbar)).powf(0.25) * root * e.exp())
}

/// Oscillator eigenstate amplitude
/// `A_n = (varpi/ħ)^{1/4} √(2πħ nu/ζ*) e^{-i mu Q²/(2 varpi nu)} (-iu)ⁿ φ_n(Q)`
/// with `u = ζ/|ζ|` and `Q = √(varpi/ħ) X/|ζ|`.
pub fn hermite_amplitude(n: usize, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<Complex64> {
    require_nu(frame)?;
    let pt = OscillatorPoint::new(frame, x, hbar, varpi)?;
    let phase = Complex64::from_polar(1.0, n as f64 * (Complex64::new(0.0, -1.0) * pt.u).arg());
    Ok(pt.prefactor(frame, hbar, varpi) * phase * hermite_phi(n, pt.q)?)
}

/// `-Q²/2 - i√2 α u Q + u² α²/2`, the logarithm of the α-dependent part of
/// `A_α` up to `π^{-1/4} e^{-|α|²/2}`. Kept in log form because the real part
/// grows like `|α|²` and only the combination with `-|α|²/2` is bounded.
pub(crate) fn coherent_log_core(alpha: Complex64, pt: &OscillatorPoint) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    -0.5 * pt.q * pt.q - i * 2f64.sqrt() * alpha * pt.u * pt.q + 0.5 * pt.u * pt.u * alpha * alpha
}

/// Coherent-state amplitude `A_α = e^{-|α|²/2} J(α)`, written in `Q`.
pub fn coherent_amplitude(alpha: Complex64, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<Complex64> {
    require_nu(frame)?;
    let pt = OscillatorPoint::new(frame, x, hbar, varpi)?;
    Ok(pt.prefactor(frame, hbar, varpi) * PI.powf(-0.25) * (coherent_log_core(alpha, &pt) - 0.5 * alpha.norm_sqr()).exp())
}

/// Amplitude of any catalog or custom state. Oscillator-family states use
/// the closed forms; box and custom states use the oscillatory quadrature.
pub fn tomogram_amplitude(state: &StateSpec, frame: TomographyFrame, x: f64) -> Result<TomogramAmplitude> {
    require_nu(frame)?;
    let hbar = state.hbar;
    let value = match &state.kind {
        StateKind::HoEigen { n, varpi } => hermite_amplitude(*n, frame, x, hbar, *varpi)?,
        StateKind::Coherent { alpha, varpi } => coherent_amplitude(*alpha, frame, x, hbar, *varpi)?,
        StateKind::Cat { alpha, parity, varpi } => {
            let sign = if *parity == Parity::Even { 1.0 } else { -1.0 };
            cat_norm(*alpha, *parity)
                * (coherent_amplitude(*alpha, frame, x, hbar, *varpi)? + sign * coherent_amplitude(-alpha, frame, x, hbar, *varpi)?)
        }
        StateKind::Superposition { n, m, varpi } => {
            (hermite_amplitude(*n, frame, x, hbar, *varpi)? + hermite_amplitude(*m, frame, x, hbar, *varpi)?) / 2f64.sqrt()
        }
        StateKind::BoxEigen { .. } | StateKind::CustomGrid(_) => position_amplitude(state, frame, x)?,
    };
    Ok(TomogramAmplitude { value, frame, x, hbar })
}

/// `A_ψ` by oscillatory quadrature of the defining integral over the
/// state's position window. The box amplitude is split into the two pure
/// chirps `∫_0^L e^{i(a y² + (b ± k) y)} dy`.
pub fn position_amplitude(state: &StateSpec, frame: TomographyFrame, x: f64) -> Result<Complex64> {
    require_nu(frame)?;
    let hbar = state.hbar;
    let a = frame.mu / (2.0 * hbar * frame.nu);
    let b = -x / (hbar * frame.nu);
    let w = state.position_window();
    if let StateKind::BoxEigen { n, length } = state.kind {
        let (minus, plus) = box_chirps(n, length, a, b)?;
        return Ok((2.0 / length).sqrt() * (minus - plus) / Complex64::new(0.0, 2.0));
    }
    ChirpQuadrature::new(w.max_panel).integrate(w.lo, w.hi, a, b, |y| state.psi(y).unwrap_or_default())
}

/// `A∓ = ∫_0^L e^{i(a y² + (b ± k) y)} dy` with `k = nπ/L`.
pub(crate) fn box_chirps(n: usize, length: f64, a: f64, b: f64) -> Result<(Complex64, Complex64)> {
    let k = n as f64 * PI / length;
    let one = |_: f64| Complex64::new(1.0, 0.0);
    let quad = ChirpQuadrature::new(length);
    Ok((
        quad.integrate(0.0, length, a, b + k, one)?,
        quad.integrate(0.0, length, a, b - k, one)?,
    ))
}

/// `B_ψ = ∫ ψ̂(p) e^{-i nu p²/(2ħ mu) + i X p/(ħ mu)} dp` over the momentum
/// window; the tomogram is `|B|² / (2πħ|mu|)`.
pub fn momentum_amplitude(state: &StateSpec, frame: TomographyFrame, x: f64) -> Result<Complex64> {
    if frame.mu == 0.0 {
        return Err(TomoError::InvalidArgument("the momentum representation needs mu != 0".into()));
    }
    let hbar = state.hbar;
    let a = -frame.nu / (2.0 * hbar * frame.mu);
    let b = x / (hbar * frame.mu);
    let w = state.momentum_window();
    ChirpQuadrature::new(w.max_panel).integrate(w.lo, w.hi, a, b, |p| state.psi_hat(p).unwrap_or_default())
}
