//! Line integrals of sampled phase-space functions.

use super::frame::TomographyFrame;
use super::grid::GridFunction2D;

/// `∫∫ f(q, p) δ(X - mu q - nu p) dq dp` for `f` sampled on a `(q, p)` grid.
///
/// The line `mu q + nu p = X` is parametrised by arc length `t` from its
/// closest point to the origin,
/// `(q, p) = X (mu, nu) / r² + t (-nu, mu) / r` with `r = |(mu, nu)|`,
/// which turns the delta into the Jacobian `1 / r`. The integral along the
/// clipped chord uses the trapezoid rule with spacing `step` on bilinear
/// interpolants of `f`. The frame must be non-zero.
pub fn line_integral(f: &GridFunction2D<f64>, frame: TomographyFrame, x: f64, step: f64) -> f64 {
    let r = frame.norm();
    debug_assert!(r > 0.0);
    let (q0, p0) = (x * frame.mu / (r * r), x * frame.nu / (r * r));
    let (dq, dp) = (-frame.nu / r, frame.mu / r);
    let Some((t_lo, t_hi)) =
        clip(q0, dq, f.first.min, f.first.max).and_then(|a| clip(p0, dp, f.second.min, f.second.max).map(|b| (a.0.max(b.0), a.1.min(b.1))))
    else {
        return 0.0;
    };
    if t_hi <= t_lo {
        return 0.0;
    }
    let n = ((t_hi - t_lo) / step).ceil().max(1.0) as usize;
    let h = (t_hi - t_lo) / n as f64;
    let mut sum = 0.0;
    for k in 0..=n {
        let t = t_lo + h * k as f64;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        sum += w * f.interpolate(q0 + t * dq, p0 + t * dp);
    }
    sum * h / r
}

/// Parameter interval on which `a + t d` lies in `[lo, hi]`.
fn clip(a: f64, d: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if d.abs() < 1e-15 {
        return (a >= lo && a <= hi).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let (t1, t2) = ((lo - a) / d, (hi - a) / d);
    Some((t1.min(t2), t1.max(t2)))
}
