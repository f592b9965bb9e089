use std::f64::consts::PI;

use anyhow::{anyhow, bail, Result};
use serde::Serialize;
use tomolab_core::classical::{classical_box_tomogram_grid, oscillator_cell_mass, oscillator_radius};
use tomolab_core::phase::io::{fmt_f64, write_atomic};
use tomolab_core::phase::metrics::{l1_masked, local_average, wasserstein1};
use tomolab_core::quantum::{coherent_centre, state_tomogram, StateKind, StateSpec};
use tomolab_core::{Tomogram, TomographyFrame, UniformGrid};

use crate::config::annotate;
use crate::{auto_grid, write_json, Outcome, RunConfig};

/// Classical model a quantum state is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Classical {
    /// Time-averaged oscillator with unit mass and frequency.
    Oscillator,
    /// Time-averaged particle in the well `[0, length]`.
    Box { length: Option<f64> },
    /// A phase-space point; `None` takes the centre of a coherent state.
    Point { q: Option<f64>, p: Option<f64> },
}

/// `oscillator`, `box[:L=<f>]` or `point[:q=<f>,p=<f>]`.
pub fn parse_classical(input: &str) -> Result<Classical> {
    let (kind, rest) = input.split_once(':').unwrap_or((input, ""));
    let allowed: &[&str] = match kind {
        "oscillator" => &[],
        "box" => &["L"],
        "point" => &["q", "p"],
        _ => {
            return Err(annotate(
                "--classical",
                input,
                &format!("unknown classical model `{kind}` (expected oscillator, box or point)"),
            ))
        }
    };
    let mut values = Vec::new();
    for tok in rest.split(',').filter(|t| !t.is_empty()) {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| annotate("--classical", input, &format!("expected key=value, got `{tok}`")))?;
        if !allowed.contains(&k) {
            return Err(annotate("--classical", input, &format!("unknown key `{k}` for model {kind}")));
        }
        let v: f64 = v
            .parse()
            .map_err(|_| annotate("--classical", input, &format!("`{v}` is not a number")))?;
        values.push((k, v));
    }
    let get = |k: &str| values.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
    Ok(match kind {
        "oscillator" => Classical::Oscillator,
        "box" => Classical::Box { length: get("L") },
        _ => Classical::Point { q: get("q"), p: get("p") },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub mu: f64,
    pub nu: f64,
    pub metric: Option<&'static str>,
    pub distance: Option<f64>,
    /// Averaging half-width at the tomogram centre.
    pub window: Option<f64>,
    pub excluded: Option<String>,
    /// `W1` of a Gaussian of the tomogram's width against its centre, for
    /// coherent states compared with a point.
    pub gaussian_reference: Option<f64>,
    pub error: Option<String>,
}

struct RowData {
    metric: &'static str,
    distance: f64,
    window: Option<f64>,
    excluded: Option<String>,
    gaussian_reference: Option<f64>,
    grid: UniformGrid,
    quantum: Vec<f64>,
    averaged: Vec<f64>,
    classical: Vec<f64>,
}

/// Mean energy of the state under the unit oscillator or the box
/// Hamiltonian.
fn state_energy(state: &StateSpec) -> Option<f64> {
    let h = state.hbar;
    match &state.kind {
        StateKind::HoEigen { n, varpi } if *varpi == 1.0 => Some(h * (*n as f64 + 0.5)),
        StateKind::Coherent { alpha, varpi } if *varpi == 1.0 => Some(h * (alpha.norm_sqr() + 0.5)),
        StateKind::BoxEigen { n, length } => Some(0.5 * (h * *n as f64 * PI / length).powi(2)),
        _ => None,
    }
}

fn grid_between(lo: f64, hi: f64, step: f64) -> Result<UniformGrid> {
    let margin = 0.05 * (hi - lo);
    Ok(UniformGrid::with_max_step(lo - margin, hi + margin, step)?)
}

/// `W1` when either side carries atoms, the L¹ distance of the averaged
/// quantum tomogram otherwise.
fn distance(quantum: &Tomogram, classical: &Tomogram, averaged: &[f64], include: impl Fn(f64) -> bool) -> Result<(&'static str, f64)> {
    if !classical.atoms().is_empty() || !quantum.atoms().is_empty() {
        return Ok(("wasserstein1", wasserstein1(quantum, classical)?));
    }
    Ok(("l1", l1_masked(quantum.grid(), averaged, classical.values(), include)))
}

fn compare_frame(cfg: &RunConfig, state: &StateSpec, model: Classical, energy: Option<f64>, frame: TomographyFrame) -> Result<RowData> {
    if frame.is_zero() {
        bail!("frame (0, 0) has no tomogram to compare");
    }
    let panel = state.frame_window(frame).max_panel / 4.0;
    let user_grid = cfg.grid.as_ref().map(|g| g.grid()).transpose()?;
    match model {
        Classical::Oscillator => {
            if let StateKind::HoEigen { varpi, .. } | StateKind::Coherent { varpi, .. } = state.kind {
                if varpi != 1.0 {
                    bail!("the classical oscillator has unit mass and frequency; the state has varpi = {varpi}");
                }
            }
            let e = energy.ok_or_else(|| anyhow!("give --energy for this state"))?;
            let radius = oscillator_radius(frame, e);
            let r2 = frame.mu * frame.mu + frame.nu * frame.nu;
            // sin² period π r² ħ / √(R² - X²) of an eigenstate with energy e
            let period = |x: f64| {
                let x = x.abs().min(0.95 * radius);
                PI * r2 * state.hbar / (radius * radius - x * x).sqrt()
            };
            let eigen = matches!(state.kind, StateKind::HoEigen { .. });
            let grid = match user_grid {
                Some(g) => g,
                None => {
                    let step = if eigen { panel.min(period(0.0) / 16.0) } else { panel };
                    grid_between(-radius, radius, step)?
                }
            };
            let t = state_tomogram(state, frame, grid)?;
            let h = grid.step();
            let classical: Vec<f64> = grid
                .points()
                .into_iter()
                .map(|x| oscillator_cell_mass(x - 0.5 * h, x + 0.5 * h, radius) / h)
                .collect();
            let c = Tomogram::new(frame, grid, classical.clone(), Vec::new())?;
            let half = |x: f64| match cfg.window {
                Some(w) => w,
                None if eigen => 1.5 * period(x),
                None => 0.0,
            };
            let averaged = local_average(&grid, t.values(), half);
            // turning-point band excluded as in the oscillator study
            let reach = 1.3 / 2f64.sqrt() * radius;
            let (metric, d) = distance(&t, &c, &averaged, |x| x.abs() <= reach)?;
            Ok(RowData {
                metric,
                distance: d,
                window: Some(half(0.0)),
                excluded: Some(format!("|X| > {}", fmt_f64(reach))),
                gaussian_reference: None,
                grid,
                quantum: t.values().to_vec(),
                averaged,
                classical,
            })
        }
        Classical::Box { length } => {
            let length = match (length, &state.kind) {
                (Some(l), _) => l,
                (None, StateKind::BoxEigen { length, .. }) => *length,
                _ => bail!("give the well length with --classical box:L=<length>"),
            };
            let e = energy.ok_or_else(|| anyhow!("give --energy for this state"))?;
            let pmax = (2.0 * e).sqrt();
            let edges = [
                -pmax * frame.nu,
                -pmax * frame.nu + frame.mu * length,
                pmax * frame.nu,
                pmax * frame.nu + frame.mu * length,
            ];
            let lo = edges.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = edges.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // beat period |mu| L / n of the two momentum branches
            let period = match state.kind {
                StateKind::BoxEigen { n, .. } if frame.mu != 0.0 => Some(frame.mu.abs() * length / n as f64),
                _ => None,
            };
            let grid = match user_grid {
                Some(g) => g,
                None => grid_between(lo, hi, period.map_or(panel, |t| panel.min(t / 16.0)))?,
            };
            let t = state_tomogram(state, frame, grid)?;
            let c = classical_box_tomogram_grid(frame, length, e, grid)?;
            let w = cfg.window.or(period.map(|t| 0.5 * t)).unwrap_or(0.0);
            let averaged = local_average(&grid, t.values(), |_| w);
            // the quantum edges are smeared over the Fresnel width √(πħ|mu nu|)
            let fresnel = (PI * state.hbar * (frame.mu * frame.nu).abs()).sqrt();
            let zone = (2.0 * grid.step()).max(3.0 * fresnel);
            let (metric, d) = distance(&t, &c, &averaged, |x| edges.iter().all(|e| (x - e).abs() > zone))?;
            Ok(RowData {
                metric,
                distance: d,
                window: Some(w),
                excluded: Some(format!("{} around X = {}", fmt_f64(zone), edges.map(fmt_f64).join(", "))),
                gaussian_reference: None,
                grid,
                quantum: t.values().to_vec(),
                averaged,
                classical: c.values().to_vec(),
            })
        }
        Classical::Point { q, p } => {
            let centre = match &state.kind {
                StateKind::Coherent { alpha, varpi } => Some(coherent_centre(*alpha, state.hbar, *varpi)),
                _ => None,
            };
            let (q0, p0) = match (q, p, centre) {
                (Some(q), Some(p), _) => (q, p),
                (None, None, Some(c)) => c,
                _ => bail!("give the point as --classical point:q=<q>,p=<p>"),
            };
            let x0 = frame.project(q0, p0);
            // a coherent tomogram is a Gaussian of this width about its centre
            let gaussian = match &state.kind {
                StateKind::Coherent { alpha, varpi } => {
                    let (qc, pc) = coherent_centre(*alpha, state.hbar, *varpi);
                    let sigma = (0.5 * state.hbar * (frame.mu * frame.mu / varpi + frame.nu * frame.nu * varpi)).sqrt();
                    Some((frame.project(qc, pc), sigma))
                }
                _ => None,
            };
            let grid = match (user_grid, gaussian) {
                (Some(g), _) => g,
                (None, Some((xc, sigma))) => {
                    UniformGrid::with_max_step((xc - 12.0 * sigma).min(x0), (xc + 12.0 * sigma).max(x0), sigma / 16.0)?
                }
                (None, None) => {
                    let g = auto_grid(state, frame)?;
                    UniformGrid::with_max_step(g.min.min(x0), g.max.max(x0), g.step())?
                }
            };
            let t = state_tomogram(state, frame, grid)?;
            let c = Tomogram::point_mass(frame, grid, x0);
            let d = wasserstein1(&t, &c)?;
            let reference = gaussian.map(|(_, sigma)| sigma * (2.0 / PI).sqrt());
            Ok(RowData {
                metric: "wasserstein1",
                distance: d,
                window: None,
                excluded: None,
                gaussian_reference: reference,
                grid,
                quantum: t.values().to_vec(),
                averaged: t.values().to_vec(),
                classical: vec![0.0; grid.len()],
            })
        }
    }
}

fn curves_csv(d: &RowData) -> String {
    let mut out = String::from("X,quantum,averaged,classical\n");
    for i in 0..d.grid.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(d.grid.point(i)),
            fmt_f64(d.quantum[i]),
            fmt_f64(d.averaged[i]),
            fmt_f64(d.classical[i])
        ));
    }
    out
}

/// Distances between a quantum state's tomograms and a classical model's,
/// one row per frame. A frame that cannot be compared gets an error row.
pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome> {
    let state = cfg.parse_state(None)?;
    let model = parse_classical(cfg.classical.as_deref().unwrap_or("oscillator"))?;
    let energy = cfg.energy.or_else(|| state_energy(&state));
    let frames: Vec<TomographyFrame> = if cfg.frames.is_empty() {
        vec![cfg.frame_or(TomographyFrame::POSITION)?]
    } else {
        cfg.frames.iter().map(|[mu, nu]| TomographyFrame::new(*mu, *nu)).collect()
    };
    let mut out = Outcome::new();
    let mut rows = Vec::new();
    let mut table = String::from("mu,nu,metric,distance,window,error\n");
    out.lines
        .push(format!("{:>8} {:>8} {:>13} {:>14}", "mu", "nu", "metric", "distance"));
    for (k, frame) in frames.iter().enumerate() {
        let mut row = Row {
            mu: frame.mu,
            nu: frame.nu,
            metric: None,
            distance: None,
            window: None,
            excluded: None,
            gaussian_reference: None,
            error: None,
        };
        match compare_frame(cfg, &state, model, energy, *frame) {
            Ok(d) => {
                let path = cfg.out.join(format!("compare-{k:02}.csv"));
                write_atomic(&path, curves_csv(&d).as_bytes())?;
                out.files.push(path);
                out.lines
                    .push(format!("{:>8} {:>8} {:>13} {:>14.6e}", frame.mu, frame.nu, d.metric, d.distance));
                row.metric = Some(d.metric);
                row.distance = Some(d.distance);
                row.window = d.window;
                row.excluded = d.excluded;
                row.gaussian_reference = d.gaussian_reference;
            }
            Err(e) => {
                out.lines.push(format!("{:>8} {:>8} error: {e}", frame.mu, frame.nu));
                row.error = Some(e.to_string());
            }
        }
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(row.mu),
            fmt_f64(row.nu),
            row.metric.unwrap_or(""),
            row.distance.map(fmt_f64).unwrap_or_default(),
            row.window.map(fmt_f64).unwrap_or_default(),
            row.error.as_deref().unwrap_or("").replace([',', '\n'], ";")
        ));
        rows.push(row);
    }
    let csv = cfg.out.join("compare.csv");
    write_atomic(&csv, table.as_bytes())?;
    let json = cfg.out.join("compare.json");
    write_json(
        &json,
        &serde_json::json!({
            "config": cfg.to_json(),
            "state": state.descriptor(),
            "classical": model,
            "energy": energy,
            "rows": rows,
        }),
    )?;
    out.lines.push(format!("wrote {} and {}", csv.display(), json.display()));
    out.files.push(csv);
    out.files.push(json);
    Ok(out)
}
