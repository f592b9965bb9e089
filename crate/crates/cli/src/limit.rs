use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;
use tomolab_core::limits::{
    cat_interference_planck, ehrenfest_box, ehrenfest_cat, ehrenfest_coherent, ehrenfest_oscillator, geometric_sequence,
    interference_decay, planck_scaled_state, standard_battery, weak_delta_convergence, LimitReport, DEFAULT_N_VALUES,
};
use tomolab_core::phase::io::{fmt_f64, write_tomogram};
use tomolab_core::quantum::StateKind;
use tomolab_core::TomographyFrame;

use crate::{write_json, Outcome, RunConfig};

pub const STUDIES: [&str; 7] = [
    "planck-delta",
    "interference",
    "cat-interference",
    "ehrenfest-coherent",
    "ehrenfest-cat",
    "ehrenfest-box",
    "ehrenfest-oscillator",
];

/// `hbar` ratio 1/4 from `1e-2`.
pub const PLANCK_HBARS: [f64; 4] = [1e-2, 2.5e-3, 6.25e-4, 1.5625e-4];
pub const CAT_PLANCK_HBARS: [f64; 3] = [1e-2, 2.5e-3, 6.25e-4];
pub const EHRENFEST_COHERENT_HBARS: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const EHRENFEST_CAT_HBARS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Runs a study and writes `<study>.json` plus one tomogram CSV per point.
pub fn cmd_limit(cfg: &RunConfig) -> Result<Outcome> {
    let study = cfg
        .study
        .as_deref()
        .ok_or_else(|| anyhow!("limit needs a study, one of: {}", STUDIES.join(", ")))?;
    let mut report = run_study(study, cfg)?;
    let mut out = Outcome::new();
    let tomograms = std::mem::take(&mut report.tomograms);
    for (k, t) in tomograms.iter().enumerate() {
        let name = format!("{study}-{k:02}.csv");
        let hbar = report.details.get(k).and_then(|d| d.get("hbar")).copied();
        let label = format!("{study} {}={}", report.parameter_name, fmt_f64(report.values[k]));
        let path = cfg.out.join(&name);
        write_tomogram(&path, t, hbar, &label, Some(cfg.to_json()))?;
        out.files.push(path);
        report.artifacts.push(name);
    }
    let path = cfg.out.join(format!("{study}.json"));
    write_json(&path, &serde_json::json!({ "config": cfg.to_json(), "report": report }))?;
    out.files.push(path.clone());

    out.lines.push(format!(
        "study {study}: verdict {}",
        serde_json::to_value(report.verdict)?.as_str().unwrap_or("?")
    ));
    match (report.exponent, report.r2) {
        (Some(e), Some(r2)) => out.lines.push(format!("exponent {e:.4} (R² = {r2:.5})")),
        (None, Some(r2)) => out.lines.push(format!("no exponent: R² = {r2:.5} below the fit threshold")),
        _ => {}
    }
    out.lines.push(format!("{:>14}  {:>14}", report.parameter_name, "distance"));
    for (v, d) in report.values.iter().zip(&report.distances) {
        out.lines.push(format!("{v:>14.6e}  {d:>14.6e}"));
    }
    for c in &report.checks {
        out.lines.push(format!(
            "check {:<28} {:>12.4e} (threshold {:.3e}) {}",
            c.name,
            c.value,
            c.threshold,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    out.lines.push(format!("wrote {}", path.display()));
    Ok(out)
}

fn alpha(cfg: &RunConfig) -> Complex64 {
    let [re, im] = cfg.params.alpha.unwrap_or([1.0, 0.0]);
    Complex64::new(re, im)
}

fn hbars_or(cfg: &RunConfig, default: &[f64]) -> Vec<f64> {
    cfg.params.hbars.clone().unwrap_or_else(|| default.to_vec())
}

fn frames(cfg: &RunConfig, default: TomographyFrame) -> Result<Vec<TomographyFrame>> {
    if cfg.frames.is_empty() {
        Ok(vec![cfg.frame_or(default)?])
    } else {
        Ok(cfg.frames.iter().map(|[mu, nu]| TomographyFrame::new(*mu, *nu)).collect())
    }
}

pub fn run_study(study: &str, cfg: &RunConfig) -> Result<LimitReport> {
    let p = &cfg.params;
    let tests = standard_battery();
    let (q, pp) = (p.q.unwrap_or(1.0), p.p.unwrap_or(0.0));
    let report = match study {
        "planck-delta" => {
            let frame = cfg.frame_or(TomographyFrame::POSITION)?;
            let hbars = hbars_or(cfg, &PLANCK_HBARS);
            let state = cfg.parse_state(Some("coherent:re=1,im=0"))?;
            let shift = p.shift.unwrap_or(0.0);
            let family = match (&state.kind, p.gamma) {
                (StateKind::CustomGrid(profile), Some(gamma)) => hbars
                    .iter()
                    .map(|&h| planck_scaled_state(profile, gamma, shift, h))
                    .collect::<Result<Vec<_>, _>>()?,
                (_, Some(_)) => bail!("--gamma applies to custom profiles only"),
                _ => hbars.iter().map(|&h| state.with_hbar(h)).collect::<Result<Vec<_>, _>>()?,
            };
            weak_delta_convergence(&family, frame, &tests, p.center.unwrap_or(frame.mu * shift))?
        }
        "interference" => {
            let hbars = match &p.hbars {
                Some(h) => h.clone(),
                None => geometric_sequence(1e-1, 1e-4)?,
            };
            interference_decay(
                p.n.unwrap_or(0),
                p.m.unwrap_or(1),
                cfg.frame_or(TomographyFrame::new(0.6, 0.8))?,
                &hbars,
            )?
        }
        "cat-interference" => cat_interference_planck(
            alpha(cfg),
            cfg.frame_or(TomographyFrame::POSITION)?,
            &hbars_or(cfg, &CAT_PLANCK_HBARS),
            &tests,
        )?,
        "ehrenfest-coherent" => ehrenfest_coherent(
            q,
            pp,
            cfg.frame_or(TomographyFrame::POSITION)?,
            &hbars_or(cfg, &EHRENFEST_COHERENT_HBARS),
            &tests,
        )?,
        "ehrenfest-cat" => ehrenfest_cat(
            q,
            pp,
            cfg.frame_or(TomographyFrame::new(0.8, 0.6))?,
            &hbars_or(cfg, &EHRENFEST_CAT_HBARS),
            &tests,
        )?,
        "ehrenfest-box" => ehrenfest_box(
            p.length.unwrap_or(1.0),
            p.ns.as_deref().unwrap_or(&[25, 50, 100, 200]),
            &frames(cfg, TomographyFrame::new(1.0, 0.3))?,
        )?,
        "ehrenfest-oscillator" => ehrenfest_oscillator(
            p.ns.as_deref().unwrap_or(&DEFAULT_N_VALUES),
            cfg.frame_or(TomographyFrame::POSITION)?,
        )?,
        other => bail!("unknown study `{other}`; valid studies: {}", STUDIES.join(", ")),
    };
    Ok(report)
}
