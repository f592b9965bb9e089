//! Normalised Hermite functions, the Airy function, log-gamma, and the
//! large-order asymptotic form of the parabolic cylinder function `U(a, x)`.

use std::f64::consts::PI;

use crate::error::{Result, TomoError};

/// Largest order accepted by [`hermite_phi`].
pub const HERMITE_MAX_ORDER: usize = 10_000;

const RESCALE_ABOVE: f64 = 1e150;

/// `φ_n(x) = (√π 2ⁿ n!)^{-1/2} H_n(x) e^{-x²/2}`, normalised on the real line.
///
/// Uses the three-term recurrence for `φ_k e^{x²/2}` and keeps a running
/// logarithmic scale, so neither `H_n` nor the Gaussian factor can
/// overflow or underflow before the final product.
pub fn hermite_phi(n: usize, x: f64) -> Result<f64> {
    if n > HERMITE_MAX_ORDER {
        return Err(TomoError::InvalidArgument(format!("Hermite order {n} exceeds {HERMITE_MAX_ORDER}")));
    }
    let (v, log_scale) = scaled_recurrence(n, x, |_, _| {});
    Ok(finish(v, log_scale, x))
}

/// `φ_0(x), ..., φ_n(x)`.
pub fn hermite_phi_all(n: usize, x: f64) -> Vec<f64> {
    let mut raw = Vec::with_capacity(n + 1);
    scaled_recurrence(n, x, |v, s| raw.push((v, s)));
    raw.into_iter().map(|(v, s)| finish(v, s, x)).collect()
}

fn finish(v: f64, log_scale: f64, x: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let log = v.abs().ln() + log_scale - 0.5 * x * x;
    v.signum() * log.exp()
}

/// Runs the recurrence up to order `n`, reporting `(value, log_scale)` for
/// every order, and returns the last pair.
fn scaled_recurrence(n: usize, x: f64, mut visit: impl FnMut(f64, f64)) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut log_scale = 0.0;
    visit(cur, log_scale);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
        visit(cur, log_scale);
    }
    (cur, log_scale)
}

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// Maclaurin series is used on `[AIRY_NEGATIVE_SWITCH, AIRY_POSITIVE_SWITCH]`.
pub const AIRY_POSITIVE_SWITCH: f64 = 5.0;
pub const AIRY_NEGATIVE_SWITCH: f64 = -7.0;

/// Airy function `Ai(x)` for `|x| <= 100`.
pub fn airy_ai(x: f64) -> Result<f64> {
    if !(x.abs() <= 100.0) {
        return Err(TomoError::InvalidArgument(format!("airy_ai needs |x| <= 100, got {x}")));
    }
    Ok(if x > AIRY_POSITIVE_SWITCH {
        airy_asymptotic_positive(x)
    } else if x < AIRY_NEGATIVE_SWITCH {
        airy_asymptotic_negative(x)
    } else {
        airy_series(x)
    })
}

/// `Ai(x) = Ai(0) f(x) + Ai'(0) g(x)` with the two entire power series.
pub fn airy_series(x: f64) -> f64 {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= x3 / ((k3 - 1.0) * k3);
        tg *= x3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        if tf.abs() < 1e-18 * f.abs().max(1e-300) && tg.abs() < 1e-18 * g.abs().max(1e-300) {
            break;
        }
    }
    AI0 * f + AIP0 * g
}

/// `u_k` coefficients of the Airy asymptotic expansions. Both expansions
/// are truncated at their smallest term.
fn airy_u(k: usize) -> f64 {
    let mut u = 1.0;
    for j in 1..=k {
        let jf = j as f64;
        u *= (6.0 * jf - 5.0) * (6.0 * jf - 3.0) * (6.0 * jf - 1.0) / ((2.0 * jf - 1.0) * 216.0 * jf);
    }
    u
}

/// `Ai(x) ~ e^{-ζ} / (2√π x^{1/4}) Σ (-1)^k u_k ζ^{-k}`, `ζ = (2/3) x^{3/2}`.
pub fn airy_asymptotic_positive(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        let term = airy_u(k) / zeta.powi(k as i32);
        if term > last {
            break;
        }
        sum += if k % 2 == 0 { term } else { -term };
        last = term;
        if term < 1e-17 {
            break;
        }
    }
    (-zeta).exp() / (2.0 * PI.sqrt() * x.powf(0.25)) * sum
}

/// `Ai(-x) ~ (√π x^{1/4})^{-1} [sin(ζ + π/4) P - cos(ζ + π/4) Q]`.
pub fn airy_asymptotic_negative(x: f64) -> f64 {
    let ax = -x;
    let zeta = 2.0 / 3.0 * ax.powf(1.5);
    let (mut p, mut q) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..60 {
        let term = airy_u(k) / zeta.powi(k as i32);
        if term > last {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        last = term;
        if term < 1e-17 {
            break;
        }
    }
    let phase = zeta + PI / 4.0;
    (phase.sin() * p - phase.cos() * q) / (PI.sqrt() * ax.powf(0.25))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`, Lanczos approximation with `g = 7`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(TomoError::InvalidArgument(format!("log_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the series in its accurate range
        return Ok(lanczos(x + 1.0) - x.ln());
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Parabolic cylinder `U(a, x)` for `a <= -10`, `x >= 0`, in the uniform
/// Airy-type form split into a log-magnitude prefactor and a bounded factor,
/// `U = exp(ln_prefactor) * airy_factor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicU {
    /// `ln[2^{-1/4-a/2} Γ(1/4 - a/2)]`.
    pub ln_prefactor: f64,
    /// `(τ / (ξ² - 1))^{1/4} Ai(τ)`.
    pub airy_factor: f64,
    pub xi: f64,
    pub tau: f64,
}

impl ParabolicU {
    pub fn value(&self) -> f64 {
        self.ln_prefactor.exp() * self.airy_factor
    }

    /// `ln U²`, finite as long as the Airy factor is non-zero.
    pub fn ln_square(&self) -> f64 {
        2.0 * (self.ln_prefactor + self.airy_factor.abs().ln())
    }
}

/// Smallest `|ξ - 1|` evaluated through `Θ`; closer points take the `τ = 0`
/// limit `(τ / (ξ² - 1))^{1/4} = |a|^{1/6}`.
const TURNING_POINT_BAND: f64 = 1e-7;

pub fn parabolic_u_asymptotic_parts(a: f64, x: f64) -> Result<ParabolicU> {
    if !(a <= -10.0) {
        return Err(TomoError::InvalidArgument(format!(
            "parabolic_u_asymptotic is only validated for a <= -10, got {a}"
        )));
    }
    if !(x >= 0.0) {
        return Err(TomoError::InvalidArgument(format!("parabolic_u_asymptotic needs x >= 0, got {x}")));
    }
    let abs_a = a.abs();
    let ln_prefactor = (-0.25 - 0.5 * a) * 2f64.ln() + log_gamma(0.25 - 0.5 * a)?;
    let xi = x / (2.0 * abs_a.sqrt());
    let (tau, ratio) = if (xi - 1.0).abs() < TURNING_POINT_BAND {
        (0.0, abs_a.powf(2.0 / 3.0))
    } else {
        let theta = if xi < 1.0 {
            0.25 * (xi.acos() - xi * (1.0 - xi * xi).sqrt())
        } else {
            0.25 * (xi * (xi * xi - 1.0).sqrt() - xi.acosh())
        };
        let mag = (4.0 * abs_a).powf(2.0 / 3.0) * (1.5 * theta).powf(2.0 / 3.0);
        let tau = if xi < 1.0 { -mag } else { mag };
        (tau, tau / (xi * xi - 1.0))
    };
    let ai = if tau.abs() <= 100.0 {
        airy_ai(tau)?
    } else if tau > 0.0 {
        airy_asymptotic_positive(tau)
    } else {
        airy_asymptotic_negative(tau)
    };
    Ok(ParabolicU {
        ln_prefactor,
        airy_factor: ratio.powf(0.25) * ai,
        xi,
        tau,
    })
}

/// `U(a, x) ≃ 2^{-1/4-a/2} Γ(1/4 - a/2) (τ / (ξ² - 1))^{1/4} Ai(τ)`.
pub fn parabolic_u_asymptotic(a: f64, x: f64) -> Result<f64> {
    Ok(parabolic_u_asymptotic_parts(a, x)?.value())
}
