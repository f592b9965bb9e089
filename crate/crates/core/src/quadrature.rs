//! Gauss–Legendre rules and an adaptive panel integrator for chirped
//! integrands `g(y) e^{i(a y² + b y)}`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Result, TomoError};

/// Nodes per Gauss–Legendre panel.
pub const PANEL_ORDER: usize = 8;

/// Largest phase change allowed across one panel: an eighth of a period.
pub const MAX_PANEL_PHASE: f64 = PI / 4.0;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Composite Gauss–Legendre integrator for `∫ g(y) e^{i(a y² + b y)} dy`.
///
/// Panels are sized so that the phase changes by at most [`MAX_PANEL_PHASE`]
/// across each one and are never wider than `max_panel`, which should
/// resolve the envelope `g`. If the interval needs more than `node_budget`
/// nodes the integral is refused with the required count.
#[derive(Debug, Clone, Copy)]
pub struct ChirpQuadrature {
    pub max_panel: f64,
    pub node_budget: usize,
}

impl ChirpQuadrature {
    pub const DEFAULT_BUDGET: usize = 8_000_000;

    pub fn new(max_panel: f64) -> Self {
        ChirpQuadrature {
            max_panel,
            node_budget: Self::DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, node_budget: usize) -> Self {
        self.node_budget = node_budget;
        self
    }

    /// Width of the panel starting at `y`: the largest `h <= max_panel` with
    /// `h (|φ'(y)| + 2|a| h) <= MAX_PANEL_PHASE`, which bounds `max |φ'|`
    /// over the panel.
    fn panel_width(&self, y: f64, a: f64, b: f64) -> f64 {
        let s = (2.0 * a * y + b).abs();
        let h = if a == 0.0 {
            if s == 0.0 {
                f64::INFINITY
            } else {
                MAX_PANEL_PHASE / s
            }
        } else {
            let c = 2.0 * a.abs();
            (-s + (s * s + 4.0 * c * MAX_PANEL_PHASE).sqrt()) / (2.0 * c)
        };
        h.min(self.max_panel)
    }

    /// Number of nodes the interval needs, from the total phase variation
    /// and the envelope limit.
    pub fn required_nodes(&self, lo: f64, hi: f64, a: f64, b: f64) -> usize {
        let mut phase = 0.0;
        let dphi = |y: f64| 2.0 * a * y + b;
        let stationary = -b / (2.0 * a);
        let mut cuts = vec![lo];
        if a != 0.0 && stationary > lo && stationary < hi {
            cuts.push(stationary);
        }
        cuts.push(hi);
        for w in cuts.windows(2) {
            // φ' is linear, so |∫φ'| on a monotone piece is the mean times length
            phase += 0.5 * (dphi(w[0]) + dphi(w[1])).abs() * (w[1] - w[0]);
        }
        let panels = (phase / MAX_PANEL_PHASE).ceil() + ((hi - lo) / self.max_panel).ceil() + 1.0;
        (panels as usize).saturating_mul(PANEL_ORDER)
    }

    pub fn integrate(&self, lo: f64, hi: f64, a: f64, b: f64, g: impl Fn(f64) -> Complex64) -> Result<Complex64> {
        if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(TomoError::InvalidArgument(format!("bad integration interval [{lo}, {hi}]")));
        }
        if !(self.max_panel > 0.0) {
            return Err(TomoError::InvalidArgument("max_panel must be positive".into()));
        }
        let required = self.required_nodes(lo, hi, a, b);
        if required > self.node_budget {
            return Err(TomoError::PhaseResolution {
                required,
                budget: self.node_budget,
            });
        }
        let (nodes, weights) = panel_rule();
        let mut total = Complex64::new(0.0, 0.0);
        let mut y = lo;
        while y < hi {
            let h = self.panel_width(y, a, b).min(hi - y);
            let (mid, half) = (y + 0.5 * h, 0.5 * h);
            let mut panel = Complex64::new(0.0, 0.0);
            for (t, w) in nodes.iter().zip(weights) {
                let u = mid + half * t;
                panel += g(u) * Complex64::from_polar(*w, a * u * u + b * u);
            }
            total += panel * half;
            if h <= 0.0 {
                break;
            }
            y += h;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..16u32 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn fresnel_type_integral() {
        // ∫_0^1 e^{i(10 y² + 3 y)} dy against a 2-million-point trapezoid sum
        let q = ChirpQuadrature::new(0.1);
        let got = q.integrate(0.0, 1.0, 10.0, 3.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        let n = 2_000_000;
        let h = 1.0 / n as f64;
        let mut oracle = Complex64::new(0.0, 0.0);
        for k in 0..=n {
            let y = h * k as f64;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            oracle += Complex64::from_polar(w, 10.0 * y * y + 3.0 * y);
        }
        oracle *= h;
        assert!((got - oracle).norm() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn gaussian_chirp_closed_form() {
        // ∫ e^{-y²} e^{i(a y² + b y)} dy = √(π / (1 - i a)) e^{-b² / (4 (1 - i a))}
        let (a, b) = (3.0, -2.0);
        let q = ChirpQuadrature::new(0.25);
        let got = q.integrate(-9.0, 9.0, a, b, |y| Complex64::new((-y * y).exp(), 0.0)).unwrap();
        let z = Complex64::new(1.0, -a);
        let exact = (Complex64::new(PI, 0.0) / z).sqrt() * (-(b * b) / (4.0 * z)).exp();
        assert!((got - exact).norm() < 1e-12, "{got} vs {exact}");
    }

    #[test]
    fn refuses_beyond_budget() {
        let q = ChirpQuadrature::new(1.0).with_budget(1000);
        match q.integrate(0.0, 10.0, 1e4, 0.0, |_| Complex64::new(1.0, 0.0)) {
            Err(TomoError::PhaseResolution { required, budget }) => {
                assert_eq!(budget, 1000);
                assert!(required > 1000);
            }
            other => panic!("{other:?}"),
        }
    }
}
