use serde::{Deserialize, Serialize};

/// Smooth bounded test function for weak-convergence checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `exp(-(X - centre)² / (2 width²))`.
    Gaussian { centre: f64, width: f64 },
    /// `cos(X) exp(-X²/4)`.
    DampedCosine,
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { centre, width } => (-(x - centre).powi(2) / (2.0 * width * width)).exp(),
            TestFunction::DampedCosine => x.cos() * (-0.25 * x * x).exp(),
        }
    }

    /// Interval outside which `|φ| < 1e-16`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            TestFunction::Gaussian { centre, width } => {
                let r = width * (2.0 * 16.0 * 10f64.ln()).sqrt();
                (centre - r, centre + r)
            }
            TestFunction::DampedCosine => {
                let r = (4.0 * 16.0 * 10f64.ln()).sqrt();
                (-r, r)
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TestFunction::Gaussian { centre, width } => format!("gauss(c={centre},w={width})"),
            TestFunction::DampedCosine => "damped-cos".into(),
        }
    }
}

/// Gaussians of widths `{0.5, 1, 2}` centred at `{-1, 0, 1}`, plus
/// `cos(X) e^{-X²/4}`.
pub fn standard_battery() -> Vec<TestFunction> {
    let mut out = Vec::new();
    for width in [0.5, 1.0, 2.0] {
        for centre in [-1.0, 0.0, 1.0] {
            out.push(TestFunction::Gaussian { centre, width });
        }
    }
    out.push(TestFunction::DampedCosine);
    out
}
