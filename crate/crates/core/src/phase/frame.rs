use serde::{Deserialize, Serialize};

use crate::error::{Result, TomoError};

/// Label of a rotated and scaled phase-space axis, `X = mu*q + nu*p`.
///
/// `mu` carries units of inverse length and `nu` of inverse momentum, so `X`
/// has the units of a position in the transformed frame. Any real pair is a
/// valid frame; operations that divide by `mu` or `nu` say so.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomographyFrame {
    pub mu: f64,
    pub nu: f64,
}

impl TomographyFrame {
    pub const POSITION: TomographyFrame = TomographyFrame { mu: 1.0, nu: 0.0 };
    pub const MOMENTUM: TomographyFrame = TomographyFrame { mu: 0.0, nu: 1.0 };

    pub const fn new(mu: f64, nu: f64) -> Self {
        TomographyFrame { mu, nu }
    }

    /// Frame obtained by scaling `q -> s q`, `p -> p / s` and rotating by `theta`.
    pub fn from_scaling(s: f64, theta: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(TomoError::InvalidArgument(format!("scaling parameter must be positive, got {s}")));
        }
        Ok(TomographyFrame {
            mu: s * theta.cos(),
            nu: theta.sin() / s,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.mu == 0.0 && self.nu == 0.0
    }

    /// Euclidean length of `(mu, nu)` treated as a dimensionless pair.
    pub fn norm(&self) -> f64 {
        self.mu.hypot(self.nu)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        TomographyFrame {
            mu: lambda * self.mu,
            nu: lambda * self.nu,
        }
    }

    /// Phase-space coordinate of the point `(q, p)` in this frame.
    pub fn project(&self, q: f64, p: f64) -> f64 {
        self.mu * q + self.nu * p
    }

    pub fn approx_eq(&self, other: &TomographyFrame, tol: f64) -> bool {
        (self.mu - other.mu).abs() <= tol && (self.nu - other.nu).abs() <= tol
    }
}
