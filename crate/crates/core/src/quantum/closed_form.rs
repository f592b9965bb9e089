use std::f64::consts::PI;

use num_complex::Complex64;

use super::amplitude::{coherent_log_core, OscillatorPoint};
use super::state::{cat_norm, Parity};
use crate::error::Result;
use crate::phase::TomographyFrame;
use crate::special::hermite_phi;

/// `W_n = κ φ_n²(κX)` with `κ = √(varpi / (ħ (varpi² nu² + mu²)))`.
///
/// The Jacobian `κ` makes `∫ W_n dX = 1`; without it the square `φ_n²(κX)`
/// integrates to `1/κ`.
pub fn hermite_tomogram(n: usize, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<f64> {
    let pt = OscillatorPoint::new(frame, x, hbar, varpi)?;
    let phi = hermite_phi(n, pt.q)?;
    Ok(pt.kappa * phi * phi)
}

/// Gaussian `√(varpi/(πħ s²)) exp[-(√varpi X - mu √(2ħ) Re α - varpi nu √(2ħ) Im α)² / (ħ s²)]`,
/// `s² = varpi² nu² + mu²`.
pub fn coherent_tomogram(alpha: Complex64, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<f64> {
    OscillatorPoint::new(frame, x, hbar, varpi)?;
    let s2 = varpi * varpi * frame.nu * frame.nu + frame.mu * frame.mu;
    let r = varpi.sqrt() * x - frame.mu * (2.0 * hbar).sqrt() * alpha.re - varpi * frame.nu * (2.0 * hbar).sqrt() * alpha.im;
    Ok((varpi / (PI * hbar * s2)).sqrt() * (-r * r / (hbar * s2)).exp())
}

/// Interference term `Re(A_n A_m*) / (2πħ|nu|) = κ φ_n(Q) φ_m(Q) cos((n - m) θ)`
/// with `θ = arg(-iu)`. The `nu`-dependent prefactors of the two amplitudes
/// cancel, so the form also holds at `nu = 0`.
pub fn superposition_cross_term(n: usize, m: usize, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<f64> {
    let pt = OscillatorPoint::new(frame, x, hbar, varpi)?;
    let theta = (Complex64::new(0.0, -1.0) * pt.u).arg();
    let (pn, pm) = (hermite_phi(n, pt.q)?, hermite_phi(m, pt.q)?);
    Ok(pt.kappa * pn * pm * ((n as f64 - m as f64) * theta).cos())
}

/// `½ W_n + ½ W_m + Re(A_n A_m*) / (2πħ|nu|)` for `(φ_n + φ_m)/√2`.
pub fn superposition_tomogram(n: usize, m: usize, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<f64> {
    Ok(0.5 * hermite_tomogram(n, frame, x, hbar, varpi)?
        + 0.5 * hermite_tomogram(m, frame, x, hbar, varpi)?
        + superposition_cross_term(n, m, frame, x, hbar, varpi)?)
}

/// Cat interference `I = 2 Re(A_α A_{-α}*) / (2πħ|nu|)`, evaluated without
/// the `1/nu` prefactors, which cancel.
pub fn cat_interference(alpha: Complex64, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<f64> {
    let pt = OscillatorPoint::new(frame, x, hbar, varpi)?;
    Ok(2.0 * pt.kappa / PI.sqrt() * (cat_log_cross(alpha, &pt) - alpha.norm_sqr()).exp().re)
}

/// `log[core(α) core(-α)*]`. Its imaginary part is the fringe phase of the
/// cat interference term.
pub(crate) fn cat_log_cross(alpha: Complex64, pt: &OscillatorPoint) -> Complex64 {
    coherent_log_core(alpha, pt) + coherent_log_core(-alpha, pt).conj()
}

/// Phase `φ(X)` of the cat interference term, `I ∝ cos φ(X)` with a positive
/// envelope.
pub fn cat_interference_phase(alpha: Complex64, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<f64> {
    let pt = OscillatorPoint::new(frame, x, hbar, varpi)?;
    Ok(cat_log_cross(alpha, &pt).im)
}

/// `N_±² [W_α + W_{-α} ± I]`.
pub fn cat_tomogram(alpha: Complex64, parity: Parity, frame: TomographyFrame, x: f64, hbar: f64, varpi: f64) -> Result<f64> {
    let n2 = cat_norm(alpha, parity).powi(2);
    let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
    let direct = coherent_tomogram(alpha, frame, x, hbar, varpi)? + coherent_tomogram(-alpha, frame, x, hbar, varpi)?;
    Ok(n2 * (direct + sign * cat_interference(alpha, frame, x, hbar, varpi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::amplitude::{coherent_amplitude, hermite_amplitude};
    use crate::quantum::{tomogram_amplitude, StateSpec};

    fn integrate(f: impl Fn(f64) -> f64, half: f64) -> f64 {
        let n = 20_001;
        let h = 2.0 * half / (n - 1) as f64;
        (0..n)
            .map(|k| {
                let w = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
                w * f(-half + h * k as f64)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn ground_state_at_origin() {
        let v = hermite_tomogram(0, TomographyFrame::POSITION, 0.0, 1.0, 1.0).unwrap();
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!((v - 0.564190).abs() < 1e-6);
        assert_eq!(hermite_tomogram(1, TomographyFrame::new(0.3, 0.7), 0.0, 0.5, 1.0).unwrap(), 0.0);
        assert!(hermite_tomogram(0, TomographyFrame::new(0.0, 0.0), 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hermite_tomograms_are_normalised() {
        for n in [0, 3, 10] {
            let f = TomographyFrame::new(0.6, -1.4);
            let m = integrate(|x| hermite_tomogram(n, f, x, 0.4, 2.0).unwrap(), 12.0);
            assert!((m - 1.0).abs() < 1e-10, "n = {n}: {m}");
        }
    }

    #[test]
    fn coherent_peak_and_reduction() {
        let alpha = Complex64::new(1.0, 0.0);
        let f = TomographyFrame::POSITION;
        let at = |x: f64| coherent_tomogram(alpha, f, x, 1.0, 1.0).unwrap();
        let peak = 2f64.sqrt();
        assert!(at(peak) > at(peak + 1e-4) && at(peak) > at(peak - 1e-4));
        for (mu, nu, x) in [(0.3, 0.8, -0.4), (1.0, 0.0, 0.9), (0.0, -2.0, 1.3)] {
            let fr = TomographyFrame::new(mu, nu);
            let a = coherent_tomogram(Complex64::new(0.0, 0.0), fr, x, 0.7, 1.5).unwrap();
            let b = hermite_tomogram(0, fr, x, 0.7, 1.5).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        let m = integrate(
            |x| coherent_tomogram(Complex64::new(0.5, -1.0), TomographyFrame::new(0.4, 1.1), x, 0.3, 1.0).unwrap(),
            10.0,
        );
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_closed_form_matches_amplitude() {
        let alpha = Complex64::new(-0.6, 1.1);
        for (mu, nu) in [(0.5, 0.5), (-1.2, 0.3), (0.1, -2.0)] {
            let f = TomographyFrame::new(mu, nu);
            for x in [-1.0, 0.0, 0.8] {
                let a = coherent_amplitude(alpha, f, x, 0.9, 1.3).unwrap();
                let from_amp = a.norm_sqr() / (2.0 * PI * 0.9 * nu.abs());
                let closed = coherent_tomogram(alpha, f, x, 0.9, 1.3).unwrap();
                assert!((from_amp - closed).abs() < 1e-12 * closed.max(1.0), "{from_amp} vs {closed}");
            }
        }
    }

    #[test]
    fn superposition_terms() {
        let (n, m) = (2, 5);
        let f = TomographyFrame::new(0.7, 0.5);
        let s = StateSpec::superposition(n, m, 0.6).unwrap();
        for x in [-1.5, -0.2, 0.9] {
            let a = tomogram_amplitude(&s, f, x).unwrap().density();
            let b = superposition_tomogram(n, m, f, x, 0.6, 1.0).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            let cross = (hermite_amplitude(n, f, x, 0.6, 1.0).unwrap() * hermite_amplitude(m, f, x, 0.6, 1.0).unwrap().conj()).re
                / (2.0 * PI * 0.6 * 0.5);
            assert!((cross - superposition_cross_term(n, m, f, x, 0.6, 1.0).unwrap()).abs() < 1e-12);
        }
        let total = integrate(|x| superposition_tomogram(n, m, f, x, 0.6, 1.0).unwrap(), 10.0);
        assert!((total - 1.0).abs() < 1e-10);
        let cross = integrate(|x| superposition_cross_term(n, m, f, x, 0.6, 1.0).unwrap(), 10.0);
        assert!(cross.abs() < 1e-10);
        for k in 0..2001 {
            let x = -5.0 + 0.005 * k as f64;
            assert!(superposition_tomogram(n, m, TomographyFrame::new(-0.3, 1.2), x, 0.6, 1.0).unwrap() >= -1e-15);
        }
    }

    #[test]
    fn superposition_position_marginal() {
        let (n, m, hbar) = (1, 4, 0.5);
        let s = StateSpec::superposition(n, m, hbar).unwrap();
        for x in [-1.0, 0.3, 0.7] {
            let exact = s.psi(x).unwrap().norm_sqr();
            let got = superposition_tomogram(n, m, TomographyFrame::POSITION, x, hbar, 1.0).unwrap();
            assert!((exact - got).abs() < 1e-12);
            let back = superposition_tomogram(n, m, TomographyFrame::new(-1.0, 0.0), -x, hbar, 1.0).unwrap();
            assert!((exact - back).abs() < 1e-12);
        }
    }

    #[test]
    fn cat_interference_integral() {
        let alpha = Complex64::new(1.0, 0.0);
        let f = TomographyFrame::new(0.8, 0.6);
        let total = integrate(|x| cat_interference(alpha, f, x, 1.0, 1.0).unwrap(), 12.0);
        assert!((total - 2.0 * (-2.0f64).exp()).abs() < 1e-10, "{total}");
        assert!((2.0 * (-2.0f64).exp() - 0.270671).abs() < 1e-6);
    }

    #[test]
    fn cat_tomograms_are_normalised_and_match_amplitudes() {
        for a in [0.5, 1.0, 2.0] {
            let alpha = Complex64::new(a, 0.3);
            for parity in [Parity::Even, Parity::Odd] {
                let f = TomographyFrame::new(-0.5, 0.9);
                let m = integrate(|x| cat_tomogram(alpha, parity, f, x, 0.8, 1.0).unwrap(), 12.0);
                assert!((m - 1.0).abs() < 1e-6, "{a} {parity:?}: {m}");
                let s = StateSpec::cat(alpha, parity, 0.8).unwrap();
                for x in [-0.7, 0.4] {
                    let amp = tomogram_amplitude(&s, f, x).unwrap().density();
                    let closed = cat_tomogram(alpha, parity, f, x, 0.8, 1.0).unwrap();
                    assert!((amp - closed).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn even_cat_interference_peaks_at_origin_in_momentum() {
        let alpha = Complex64::new(1.5, 0.0);
        let at = |x: f64| cat_interference(alpha, TomographyFrame::MOMENTUM, x, 1.0, 1.0).unwrap();
        assert!(at(0.0) > 0.0);
        for x in [0.3, 0.8, 1.6, 3.0] {
            assert!(at(0.0) >= at(x).abs());
        }
    }

    #[test]
    fn coherent_amplitude_overlaps() {
        // ∫ A_ψ A_φ* / (2πħ|nu|) dX = <φ|ψ>
        let f = TomographyFrame::new(0.9, 0.7);
        let hbar = 0.5;
        let (a, b) = (Complex64::new(0.4, 0.2), Complex64::new(-0.3, 0.5));
        let overlap = |g: &dyn Fn(f64) -> Complex64| {
            let n = 8001;
            let half = 10.0;
            let h = 2.0 * half / (n - 1) as f64;
            (0..n).map(|k| g(-half + h * k as f64) * h).sum::<Complex64>() / (2.0 * PI * hbar * f.nu.abs())
        };
        let got = overlap(&|x| coherent_amplitude(a, f, x, hbar, 1.0).unwrap() * coherent_amplitude(b, f, x, hbar, 1.0).unwrap().conj());
        let exact = (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a * b.conj()).exp();
        assert!((got - exact).norm() < 1e-10, "{got} vs {exact}");
        let nm = overlap(&|x| hermite_amplitude(3, f, x, hbar, 1.0).unwrap() * coherent_amplitude(a, f, x, hbar, 1.0).unwrap().conj());
        // <α|3> = e^{-|α|²/2} α*³ / √3!
        let exact = (-0.5 * a.norm_sqr()).exp() * a.conj().powu(3) / 6f64.sqrt();
        assert!((nm - exact).norm() < 1e-10, "{nm} vs {exact}");
    }
}
