use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::phase::io::read_wavefunction;
use crate::phase::tomogram::trapezoid;
use crate::phase::{TomographyFrame, UniformGrid};
use crate::special::{hermite_phi, HERMITE_MAX_ORDER};

/// Tolerance on the L² norm of a sampled wave function.
pub const CUSTOM_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Wave function given by samples on a uniform grid, zero outside it and
/// cubic-interpolated between nodes.
#[derive(Debug, Clone)]
pub struct CustomState {
    grid: UniformGrid,
    psi: Arc<Vec<Complex64>>,
    source: Option<String>,
    momentum: Arc<OnceLock<(UniformGrid, Vec<Complex64>)>>,
}

impl CustomState {
    pub fn new(grid: UniformGrid, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != grid.len() || grid.len() < 4 {
            return Err(TomoError::InvalidArgument(format!(
                "{} samples for a grid of {} points (at least 4 needed)",
                psi.len(),
                grid.len()
            )));
        }
        let density: Vec<f64> = psi.iter().map(|v| v.norm_sqr()).collect();
        let norm = trapezoid(&density, grid.step());
        if (norm - 1.0).abs() > CUSTOM_NORM_TOL {
            return Err(TomoError::InvalidArgument(format!(
                "wave function has norm {norm:.12}, expected 1 within {CUSTOM_NORM_TOL:e}"
            )));
        }
        Ok(CustomState {
            grid,
            psi: Arc::new(psi),
            source: None,
            momentum: Arc::new(OnceLock::new()),
        })
    }

    /// Reads `x,re[,im]` rows.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let (grid, psi) = read_wavefunction(path)?;
        let mut s = Self::new(grid, psi)?;
        s.source = Some(path.display().to_string());
        Ok(s)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn value(&self, x: f64) -> Complex64 {
        cubic(&self.grid, &self.psi, x)
    }

    /// Mean and standard deviation of position and momentum.
    fn spreads(&self, hbar: f64) -> (f64, f64) {
        let h = self.grid.step();
        let n = self.psi.len();
        let dens: Vec<f64> = self.psi.iter().map(|v| v.norm_sqr()).collect();
        let xs = self.grid.points();
        let m1 = trapezoid(&dens.iter().zip(&xs).map(|(d, x)| d * x).collect::<Vec<_>>(), h);
        let m2 = trapezoid(&dens.iter().zip(&xs).map(|(d, x)| d * x * x).collect::<Vec<_>>(), h);
        let mut k1 = Complex64::new(0.0, 0.0);
        let mut k2 = 0.0;
        for i in 0..n {
            let prev = if i == 0 { Complex64::new(0.0, 0.0) } else { self.psi[i - 1] };
            let next = if i + 1 == n { Complex64::new(0.0, 0.0) } else { self.psi[i + 1] };
            let d = (next - prev) / (2.0 * h);
            k1 += self.psi[i].conj() * d * h;
            k2 += d.norm_sqr() * h;
        }
        // <p> = -iħ ∫ψ*ψ', <p²> = ħ² ∫|ψ'|²
        let p1 = hbar * k1.im;
        let p2 = hbar * hbar * k2;
        let sx = (m2 - m1 * m1).max(0.0).sqrt().max(h);
        let sp = (p2 - p1 * p1).max(0.0).sqrt().max(hbar / (self.grid.max - self.grid.min));
        (sx, sp)
    }

    /// `F(s) = ∫ ψ(y) e^{-isy} dy` on the band `|s| <= π/h`, computed once by
    /// direct summation; `ψ̂(p) = F(p/ħ) / √(2πħ)`.
    fn wavenumber_table(&self) -> &(UniformGrid, Vec<Complex64>) {
        self.momentum.get_or_init(|| {
            let h = self.grid.step();
            let width = self.grid.max - self.grid.min + h;
            let band = PI / h;
            // spacing resolves the e^{-isy} phase across the support
            let count = ((2.0 * band) / (0.125 * PI / width)).ceil() as usize + 1;
            let sg = UniformGrid::symmetric(band, count.max(8)).expect("valid wavenumber band");
            let n = self.psi.len();
            let vals = (0..sg.len())
                .map(|k| {
                    let s = sg.point(k);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (i, v) in self.psi.iter().enumerate() {
                        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
                        acc += v * Complex64::from_polar(w, -s * self.grid.point(i));
                    }
                    acc * h
                })
                .collect();
            (sg, vals)
        })
    }

    fn momentum_value(&self, p: f64, hbar: f64) -> Complex64 {
        let (g, v) = self.wavenumber_table();
        cubic(g, v, p / hbar) / (2.0 * PI * hbar).sqrt()
    }
}

/// Smallest grid interval outside which every sample is below `1e-9` of the
/// largest one in modulus, widened by two nodes for the interpolation stencil.
fn occupied(grid: &UniformGrid, v: &[Complex64]) -> (f64, f64) {
    let top = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let keep = |z: &Complex64| z.norm() > 1e-9 * top;
    let first = v.iter().position(keep).unwrap_or(0);
    let last = v.iter().rposition(keep).unwrap_or(v.len() - 1);
    (grid.point(first.saturating_sub(2)), grid.point((last + 2).min(v.len() - 1)))
}

/// Local four-point Lagrange interpolation, zero outside the grid.
fn cubic(grid: &UniformGrid, v: &[Complex64], x: f64) -> Complex64 {
    let Some((i, t)) = grid.locate(x) else {
        return Complex64::new(0.0, 0.0);
    };
    let n = v.len();
    let base = i.saturating_sub(1).min(n - 4);
    let s = t + (i - base) as f64;
    let mut out = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if j != k {
                w *= (s - j as f64) / (k as f64 - j as f64);
            }
        }
        out += v[base + k] * w;
    }
    out
}

#[derive(Debug, Clone)]
pub enum StateKind {
    /// Oscillator eigenstate `n` with `varpi = m omega`.
    HoEigen {
        n: usize,
        varpi: f64,
    },
    Coherent {
        alpha: Complex64,
        varpi: f64,
    },
    Cat {
        alpha: Complex64,
        parity: Parity,
        varpi: f64,
    },
    /// `(φ_n + φ_m) / √2`.
    Superposition {
        n: usize,
        m: usize,
        varpi: f64,
    },
    /// Infinite well on `[0, length]`, `n >= 1`.
    BoxEigen {
        n: usize,
        length: f64,
    },
    CustomGrid(CustomState),
}

/// A pure state together with the value of `hbar` it lives at.
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub kind: StateKind,
    pub hbar: f64,
}

/// Integration window `[lo, hi]` and the largest panel that resolves the
/// envelope there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub max_panel: f64,
}

/// Gaussian tails are cut this many widths beyond the classical region.
const TAIL_WIDTHS: f64 = 10.0;

fn bad(msg: String) -> TomoError {
    TomoError::InvalidArgument(msg)
}

impl StateSpec {
    pub fn new(kind: StateKind, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(bad(format!("hbar must be positive, got {hbar}")));
        }
        let check_varpi = |v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(bad(format!("varpi must be positive, got {v}")))
            }
        };
        let check_order = |n: usize| {
            if n <= HERMITE_MAX_ORDER {
                Ok(())
            } else {
                Err(bad(format!("oscillator level {n} exceeds {HERMITE_MAX_ORDER}")))
            }
        };
        match &kind {
            StateKind::HoEigen { n, varpi } => {
                check_order(*n)?;
                check_varpi(*varpi)?;
            }
            StateKind::Coherent { alpha, varpi } | StateKind::Cat { alpha, varpi, .. } => {
                check_varpi(*varpi)?;
                if !alpha.re.is_finite() || !alpha.im.is_finite() {
                    return Err(bad(format!("alpha must be finite, got {alpha}")));
                }
                if let StateKind::Cat { parity: Parity::Odd, .. } = kind {
                    if alpha.norm() == 0.0 {
                        return Err(bad("the odd cat state needs alpha != 0".into()));
                    }
                }
            }
            StateKind::Superposition { n, m, varpi } => {
                check_order(*n.max(m))?;
                check_varpi(*varpi)?;
                if n == m {
                    return Err(bad(format!("superposition needs n != m, got n = m = {n}")));
                }
            }
            StateKind::BoxEigen { n, length } => {
                if *n == 0 {
                    return Err(bad("box level must be at least 1".into()));
                }
                if !(*length > 0.0) || !length.is_finite() {
                    return Err(bad(format!("box length must be positive, got {length}")));
                }
            }
            StateKind::CustomGrid(_) => {}
        }
        Ok(StateSpec { kind, hbar })
    }

    pub fn ho(n: usize, hbar: f64) -> Result<Self> {
        Self::new(StateKind::HoEigen { n, varpi: 1.0 }, hbar)
    }

    pub fn coherent(alpha: Complex64, hbar: f64) -> Result<Self> {
        Self::new(StateKind::Coherent { alpha, varpi: 1.0 }, hbar)
    }

    pub fn cat(alpha: Complex64, parity: Parity, hbar: f64) -> Result<Self> {
        Self::new(StateKind::Cat { alpha, parity, varpi: 1.0 }, hbar)
    }

    pub fn superposition(n: usize, m: usize, hbar: f64) -> Result<Self> {
        Self::new(StateKind::Superposition { n, m, varpi: 1.0 }, hbar)
    }

    pub fn box_eigen(n: usize, length: f64, hbar: f64) -> Result<Self> {
        Self::new(StateKind::BoxEigen { n, length }, hbar)
    }

    pub fn custom(state: CustomState, hbar: f64) -> Result<Self> {
        Self::new(StateKind::CustomGrid(state), hbar)
    }

    /// The same state at another `hbar`.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.kind.clone(), hbar)
    }

    fn varpi(&self) -> f64 {
        match self.kind {
            StateKind::HoEigen { varpi, .. }
            | StateKind::Coherent { varpi, .. }
            | StateKind::Cat { varpi, .. }
            | StateKind::Superposition { varpi, .. } => varpi,
            _ => 1.0,
        }
    }

    /// `ψ(x)`.
    pub fn psi(&self, x: f64) -> Result<Complex64> {
        let hbar = self.hbar;
        let w = self.varpi();
        let ho = |n: usize| -> Result<f64> {
            let s = (w / hbar).sqrt();
            Ok(s.sqrt() * hermite_phi(n, s * x)?)
        };
        Ok(match &self.kind {
            StateKind::HoEigen { n, .. } => ho(*n)?.into(),
            StateKind::Superposition { n, m, .. } => ((ho(*n)? + ho(*m)?) / 2f64.sqrt()).into(),
            StateKind::Coherent { alpha, .. } => coherent_psi(*alpha, x, hbar, w),
            StateKind::Cat { alpha, parity, .. } => {
                cat_norm(*alpha, *parity) * (coherent_psi(*alpha, x, hbar, w) + parity.sign() * coherent_psi(-alpha, x, hbar, w))
            }
            StateKind::BoxEigen { n, length } => {
                if (0.0..=*length).contains(&x) {
                    ((2.0 / length).sqrt() * (*n as f64 * PI * x / length).sin()).into()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            StateKind::CustomGrid(c) => c.value(x),
        })
    }

    /// `ψ̂(p) = (2πħ)^{-1/2} ∫ ψ(y) e^{-ipy/ħ} dy`.
    pub fn psi_hat(&self, p: f64) -> Result<Complex64> {
        let hbar = self.hbar;
        let w = self.varpi();
        let ho = |n: usize| -> Result<Complex64> {
            let s = 1.0 / (w * hbar).sqrt();
            Ok(Complex64::new(0.0, -1.0).powu(n as u32) * s.sqrt() * hermite_phi(n, s * p)?)
        };
        Ok(match &self.kind {
            StateKind::HoEigen { n, .. } => ho(*n)?,
            StateKind::Superposition { n, m, .. } => (ho(*n)? + ho(*m)?) / 2f64.sqrt(),
            StateKind::Coherent { alpha, .. } => coherent_psi_hat(*alpha, p, hbar, w),
            StateKind::Cat { alpha, parity, .. } => {
                cat_norm(*alpha, *parity) * (coherent_psi_hat(*alpha, p, hbar, w) + parity.sign() * coherent_psi_hat(-alpha, p, hbar, w))
            }
            StateKind::BoxEigen { n, length } => box_psi_hat(*n, *length, p, hbar),
            StateKind::CustomGrid(c) => c.momentum_value(p, hbar),
        })
    }

    /// Natural position and momentum scales `(Q, P)`. For the oscillator
    /// family these are `√(ħ/varpi)` and `√(varpi ħ)`.
    pub fn scales(&self) -> (f64, f64) {
        match &self.kind {
            StateKind::BoxEigen { n, length } => (*length, self.hbar * *n as f64 * PI / length),
            StateKind::CustomGrid(c) => c.spreads(self.hbar),
            _ => {
                let w = self.varpi();
                ((self.hbar / w).sqrt(), (w * self.hbar).sqrt())
            }
        }
    }

    /// Largest oscillator level and coherent amplitude in the state, which
    /// set the extent and the oscillation rate of the oscillator family.
    fn ho_extent(&self) -> (f64, f64) {
        match &self.kind {
            StateKind::HoEigen { n, .. } => ((2.0 * *n as f64 + 1.0).sqrt(), 0.0),
            StateKind::Superposition { n, m, .. } => ((2.0 * *n.max(m) as f64 + 1.0).sqrt(), 0.0),
            StateKind::Coherent { alpha, .. } | StateKind::Cat { alpha, .. } => (1.0, alpha.norm()),
            _ => (0.0, 0.0),
        }
    }

    /// Window in `y` outside which `ψ` is negligible.
    pub fn position_window(&self) -> Window {
        match &self.kind {
            StateKind::BoxEigen { n, length } => Window {
                lo: 0.0,
                hi: *length,
                max_panel: length / (2.0 * *n as f64),
            },
            StateKind::CustomGrid(c) => {
                let (lo, hi) = occupied(&c.grid, &c.psi);
                Window {
                    lo,
                    hi,
                    max_panel: c.grid.step(),
                }
            }
            _ => {
                let (q, _) = self.scales();
                self.oscillator_window(q, false)
            }
        }
    }

    /// Window in `p` outside which `ψ̂` is negligible. The box has only
    /// algebraic tails; its window is the band holding all but `1e-6` of
    /// the momentum probability.
    pub fn momentum_window(&self) -> Window {
        match &self.kind {
            StateKind::BoxEigen { n, length } => {
                let k = *n as f64 * PI / length;
                // |ψ̂|² <= 8k²ħ³ / (π L p⁴) in the tails
                let tail = (8.0 * k * k * self.hbar.powi(3) / (3.0 * PI * length * 1e-6)).cbrt();
                let half = tail.max(2.0 * self.hbar * k);
                Window {
                    lo: -half,
                    hi: half,
                    max_panel: PI * self.hbar / (4.0 * length),
                }
            }
            StateKind::CustomGrid(c) => {
                let (g, v) = c.wavenumber_table();
                let (lo, hi) = occupied(g, v);
                Window {
                    lo: self.hbar * lo,
                    hi: self.hbar * hi,
                    max_panel: self.hbar * g.step(),
                }
            }
            _ => {
                let (_, p) = self.scales();
                self.oscillator_window(p, true)
            }
        }
    }

    /// Window in `X = mu q + nu p` for a non-zero frame, from the position and
    /// momentum windows. The panel is the coarser of the two projected
    /// panels, which resolves the tomogram rather than the wave function.
    pub fn frame_window(&self, frame: TomographyFrame) -> Window {
        let (q, p) = (self.position_window(), self.momentum_window());
        let span = |c: f64, w: &Window| {
            let (a, b) = (c * w.lo, c * w.hi);
            (a.min(b), a.max(b))
        };
        let (q_lo, q_hi) = span(frame.mu, &q);
        let (p_lo, p_hi) = span(frame.nu, &p);
        Window {
            lo: q_lo + p_lo,
            hi: q_hi + p_hi,
            max_panel: (frame.mu.abs() * q.max_panel).max(frame.nu.abs() * p.max_panel),
        }
    }

    fn oscillator_window(&self, scale: f64, momentum: bool) -> Window {
        let (turning, amp) = self.ho_extent();
        let w = self.varpi();
        let centre = match &self.kind {
            StateKind::Coherent { alpha, .. } => {
                let (q, p) = coherent_centre(*alpha, self.hbar, w);
                if momentum {
                    p
                } else {
                    q
                }
            }
            _ => 0.0,
        };
        let spread = match &self.kind {
            StateKind::Cat { alpha, .. } => {
                let (q, p) = coherent_centre(*alpha, self.hbar, w);
                if momentum {
                    p.abs()
                } else {
                    q.abs()
                }
            }
            _ => 0.0,
        };
        let half = spread + scale * (turning + TAIL_WIDTHS);
        Window {
            lo: centre - half,
            hi: centre + half,
            max_panel: 0.5 * scale / (1.0 + turning + 2f64.sqrt() * amp),
        }
    }

    /// Canonical descriptor, as accepted by [`parse_state`].
    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let varpi = |v: f64| if v == 1.0 { String::new() } else { format!(",varpi={v}") };
        match &self.kind {
            StateKind::HoEigen { n, varpi: v } => write!(f, "ho:n={n}{}", varpi(*v)),
            StateKind::Coherent { alpha, varpi: v } => write!(f, "coherent:re={},im={}{}", alpha.re, alpha.im, varpi(*v)),
            StateKind::Cat { alpha, parity, varpi: v } => {
                let p = if *parity == Parity::Even { "even" } else { "odd" };
                write!(f, "cat:{p},re={},im={}{}", alpha.re, alpha.im, varpi(*v))
            }
            StateKind::Superposition { n, m, varpi: v } => write!(f, "superpos:n={n},m={m}{}", varpi(*v)),
            StateKind::BoxEigen { n, length } => write!(f, "box:n={n},L={length}"),
            StateKind::CustomGrid(c) => match &c.source {
                Some(s) => write!(f, "custom:{s}"),
                None => write!(f, "custom:<{} samples on [{}, {}]>", c.grid.len(), c.grid.min, c.grid.max),
            },
        }
    }
}

/// Parse a state descriptor: `ho:n=<int>[,varpi=<f>]`, `coherent:re=<f>,im=<f>`,
/// `cat:even|odd,re=<f>,im=<f>`, `superpos:n=<int>,m=<int>`, `box:n=<int>,L=<f>`
/// or `custom:<path.csv>`. The oscillator-family kinds also accept `varpi`.
pub fn parse_state(descriptor: &str, hbar: f64) -> Result<StateSpec> {
    let (kind, rest) = descriptor
        .split_once(':')
        .ok_or_else(|| bad(format!("state descriptor `{descriptor}` has no `kind:` prefix")))?;
    if kind == "custom" {
        if rest.is_empty() {
            return Err(bad("custom state needs a path: `custom:<path.csv>`".into()));
        }
        return StateSpec::custom(CustomState::from_csv(Path::new(rest))?, hbar);
    }
    let mut tokens: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(',').collect() };
    let parity = if kind == "cat" {
        match tokens.first().copied() {
            Some("even") => Parity::Even,
            Some("odd") => Parity::Odd,
            other => return Err(bad(format!("cat state needs `even` or `odd` first, got `{}`", other.unwrap_or("")))),
        }
    } else {
        Parity::Even
    };
    if kind == "cat" {
        tokens.remove(0);
    }
    let allowed: &[&str] = match kind {
        "ho" => &["n", "varpi"],
        "coherent" | "cat" => &["re", "im", "varpi"],
        "superpos" => &["n", "m", "varpi"],
        "box" => &["n", "L"],
        _ => return Err(bad(format!("unknown state kind `{kind}` in `{descriptor}`"))),
    };
    let mut values: Vec<(&str, &str)> = Vec::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got `{tok}` in `{descriptor}`")))?;
        if !allowed.contains(&k) {
            return Err(bad(format!("unknown key `{k}` in state descriptor `{descriptor}`")));
        }
        if values.iter().any(|(seen, _)| *seen == k) {
            return Err(bad(format!("duplicate key `{k}` in state descriptor `{descriptor}`")));
        }
        values.push((k, v));
    }
    let get = |k: &str| values.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
    let real = |k: &str, default: Option<f64>| -> Result<f64> {
        match get(k) {
            Some(v) => v.parse::<f64>().map_err(|_| bad(format!("`{k}={v}` is not a number"))),
            None => default.ok_or_else(|| bad(format!("missing key `{k}` in state descriptor `{descriptor}`"))),
        }
    };
    let int = |k: &str| -> Result<usize> {
        let v = get(k).ok_or_else(|| bad(format!("missing key `{k}` in state descriptor `{descriptor}`")))?;
        v.parse::<usize>()
            .map_err(|_| bad(format!("`{k}={v}` is not a non-negative integer")))
    };
    let varpi = real("varpi", Some(1.0))?;
    let kind = match kind {
        "ho" => StateKind::HoEigen { n: int("n")?, varpi },
        "coherent" => StateKind::Coherent {
            alpha: Complex64::new(real("re", None)?, real("im", Some(0.0))?),
            varpi,
        },
        "cat" => StateKind::Cat {
            alpha: Complex64::new(real("re", None)?, real("im", Some(0.0))?),
            parity,
            varpi,
        },
        "superpos" => StateKind::Superposition {
            n: int("n")?,
            m: int("m")?,
            varpi,
        },
        _ => StateKind::BoxEigen {
            n: int("n")?,
            length: real("L", None)?,
        },
    };
    StateSpec::new(kind, hbar)
}

/// Phase-space centre `(q_α, p_α) = (√(2ħ/varpi) Re α, √(2ħ varpi) Im α)`.
pub fn coherent_centre(alpha: Complex64, hbar: f64, varpi: f64) -> (f64, f64) {
    ((2.0 * hbar / varpi).sqrt() * alpha.re, (2.0 * hbar * varpi).sqrt() * alpha.im)
}

/// `N_± = (2 (1 ± e^{-2|α|²}))^{-1/2}`.
pub fn cat_norm(alpha: Complex64, parity: Parity) -> f64 {
    1.0 / (2.0 * (1.0 + parity.sign() * (-2.0 * alpha.norm_sqr()).exp())).sqrt()
}

/// `<x|α> = (varpi/πħ)^{1/4} exp(-varpi x²/2ħ + √(2varpi/ħ) α x - α²/2 - |α|²/2)`.
fn coherent_psi(alpha: Complex64, x: f64, hbar: f64, varpi: f64) -> Complex64 {
    let s = (varpi / hbar).sqrt();
    let e = -0.5 * s * s * x * x + 2f64.sqrt() * s * x * alpha - 0.5 * alpha * alpha - 0.5 * alpha.norm_sqr();
    (s * s / PI).powf(0.25) * e.exp()
}

/// Fourier transform of [`coherent_psi`]: the same form with `α -> -iα` and
/// `varpi -> 1/varpi`.
fn coherent_psi_hat(alpha: Complex64, p: f64, hbar: f64, varpi: f64) -> Complex64 {
    coherent_psi(Complex64::new(0.0, -1.0) * alpha, p, hbar, 1.0 / varpi)
}

/// Box eigenfunction in momentum space, written through
/// `E(w) = ∫_0^L e^{iwy} dy = L e^{iwL/2} sinc(wL/2)`, which has no removable
/// singularity at `p = ±ħk`.
fn box_psi_hat(n: usize, length: f64, p: f64, hbar: f64) -> Complex64 {
    let k = n as f64 * PI / length;
    let s = p / hbar;
    let e = |w: f64| {
        let z = 0.5 * w * length;
        let sinc = if z.abs() < 1e-8 { 1.0 - z * z / 6.0 } else { z.sin() / z };
        Complex64::from_polar(length * sinc, z)
    };
    // ∫ sin(ky) e^{-isy} dy = (E(k - s) - E(-k - s)) / 2i
    let integral = (e(k - s) - e(-k - s)) / Complex64::new(0.0, 2.0);
    (2.0 / length).sqrt() * integral / (2.0 * PI * hbar).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm_on(f: impl Fn(f64) -> Complex64, w: Window) -> f64 {
        let n = 40_001;
        let g = UniformGrid::new(w.lo, w.hi, n).unwrap();
        let d: Vec<f64> = g.points().into_iter().map(|x| f(x).norm_sqr()).collect();
        trapezoid(&d, g.step())
    }

    #[test]
    fn catalog_states_are_normalised_in_both_representations() {
        let states = [
            StateSpec::ho(3, 0.4).unwrap(),
            StateSpec::new(StateKind::HoEigen { n: 2, varpi: 2.5 }, 0.7).unwrap(),
            StateSpec::coherent(Complex64::new(1.2, -0.7), 0.5).unwrap(),
            StateSpec::cat(Complex64::new(0.8, 0.3), Parity::Odd, 1.0).unwrap(),
            StateSpec::cat(Complex64::new(0.2, 0.0), Parity::Even, 1.0).unwrap(),
            StateSpec::superposition(0, 3, 0.3).unwrap(),
        ];
        for s in &states {
            let a = norm_on(|x| s.psi(x).unwrap(), s.position_window());
            let b = norm_on(|p| s.psi_hat(p).unwrap(), s.momentum_window());
            assert!((a - 1.0).abs() < 1e-10, "{s}: position norm {a}");
            assert!((b - 1.0).abs() < 1e-10, "{s}: momentum norm {b}");
        }
    }

    #[test]
    fn momentum_functions_are_fourier_transforms() {
        let states = [
            StateSpec::ho(3, 0.4).unwrap(),
            StateSpec::coherent(Complex64::new(1.2, -0.7), 0.5).unwrap(),
            StateSpec::box_eigen(3, 1.5, 0.8).unwrap(),
        ];
        for s in &states {
            let w = s.position_window();
            let g = UniformGrid::new(w.lo, w.hi, 20_001).unwrap();
            let vals: Vec<Complex64> = g.points().into_iter().map(|x| s.psi(x).unwrap()).collect();
            for p in [-1.3, 0.0, 0.4, 2.2] {
                let n = vals.len();
                let mut sum = Complex64::new(0.0, 0.0);
                for (i, v) in vals.iter().enumerate() {
                    let wt = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
                    sum += v * Complex64::from_polar(wt, -p * g.point(i) / s.hbar);
                }
                let direct = sum * g.step() / (2.0 * PI * s.hbar).sqrt();
                let got = s.psi_hat(p).unwrap();
                assert!((got - direct).norm() < 1e-6, "{s} at p = {p}: {got} vs {direct}");
            }
        }
    }

    #[test]
    fn box_momentum_at_the_classical_peaks() {
        // s = ±k: ∫ sin(ky) e^{∓iky} dy = ∓iL/2
        let (n, l, hbar) = (4, 2.0, 0.5);
        let s = StateSpec::box_eigen(n, l, hbar).unwrap();
        let p = hbar * n as f64 * PI / l;
        let expect = (2.0 / l).sqrt() * (l / 2.0) / (2.0 * PI * hbar).sqrt();
        assert!((s.psi_hat(p).unwrap() - Complex64::new(0.0, -expect)).norm() < 1e-14);
        assert!((s.psi_hat(-p).unwrap() - Complex64::new(0.0, expect)).norm() < 1e-14);
    }

    #[test]
    fn descriptors_round_trip() {
        for d in [
            "ho:n=3",
            "ho:n=2,varpi=2.5",
            "coherent:re=1,im=-0.5",
            "cat:odd,re=2,im=0",
            "superpos:n=0,m=1",
            "box:n=5,L=1.5",
        ] {
            let s = parse_state(d, 0.5).unwrap();
            assert_eq!(s.descriptor(), d);
        }
    }

    #[test]
    fn descriptor_errors_name_the_token() {
        let e = parse_state("ho:n=3,omega=2", 1.0).unwrap_err().to_string();
        assert!(e.contains("`omega`"), "{e}");
        let e = parse_state("spin:s=1", 1.0).unwrap_err().to_string();
        assert!(e.contains("`spin`"), "{e}");
        assert!(parse_state("cat:re=1,im=0", 1.0).is_err());
        assert!(parse_state("box:n=0,L=1", 1.0).is_err());
        assert!(parse_state("superpos:n=2,m=2", 1.0).is_err());
        assert!(parse_state("ho:n=1", -1.0).is_err());
    }

    #[test]
    fn custom_state_checks_norm_and_interpolates() {
        let g = UniformGrid::symmetric(8.0, 801).unwrap();
        let psi: Vec<Complex64> = g
            .points()
            .into_iter()
            .map(|x| Complex64::new(PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0))
            .collect();
        let c = CustomState::new(g, psi.clone()).unwrap();
        let x = 0.123;
        assert!((c.value(x).re - PI.powf(-0.25) * (-x * x / 2.0).exp()).abs() < 1e-7);
        assert_eq!(c.value(9.0), Complex64::new(0.0, 0.0));
        let doubled: Vec<Complex64> = psi.iter().map(|v| v * 2.0).collect();
        assert!(CustomState::new(g, doubled).is_err());
        let s = StateSpec::custom(c, 1.0).unwrap();
        let (q, p) = s.scales();
        assert!((q - 0.5f64.sqrt()).abs() < 1e-4 && (p - 0.5f64.sqrt()).abs() < 1e-3, "{q} {p}");
        let ground = StateSpec::ho(0, 1.0).unwrap();
        for p in [0.0, 0.7, -1.9] {
            assert!((s.psi_hat(p).unwrap() - ground.psi_hat(p).unwrap()).norm() < 1e-6);
        }
    }
}
