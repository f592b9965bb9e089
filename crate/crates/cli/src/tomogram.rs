use anyhow::Result;
use tomolab_core::phase::io::write_tomogram;
use tomolab_core::quantum::state_tomogram;

use crate::{auto_grid, Outcome, RunConfig};

/// Evaluates one tomogram and writes `tomogram.csv` with its sidecar.
pub fn cmd_tomogram(cfg: &RunConfig) -> Result<Outcome> {
    let state = cfg.parse_state(None)?;
    let frame = cfg.require_frame()?;
    let grid = match &cfg.grid {
        Some(g) => g.grid()?,
        None => auto_grid(&state, frame)?,
    };
    let t = state_tomogram(&state, frame, grid)?;
    let residual = t.normalization_residual()?;
    let path = cfg.out.join("tomogram.csv");
    write_tomogram(&path, &t, Some(state.hbar), &state.descriptor(), Some(cfg.to_json()))?;

    let mut out = Outcome::new();
    out.lines.push(format!(
        "{} at frame ({}, {}), hbar = {}: {} samples on [{}, {}]",
        state.descriptor(),
        frame.mu,
        frame.nu,
        state.hbar,
        grid.len(),
        grid.min,
        grid.max
    ));
    for a in t.atoms() {
        out.lines.push(format!("atom: weight {} at X = {}", a.weight, a.location));
    }
    if let Some(x) = t.argmax() {
        out.lines.push(format!("peak: W({x:.6}) = {:.6}", t.value_at(x)));
    }
    out.lines.push(format!("normalization residual: {residual:.3e}"));
    out.lines.push(format!("wrote {}", path.display()));
    out.files.push(path.clone());
    out.files.push(path.with_extension("json"));
    Ok(out)
}
