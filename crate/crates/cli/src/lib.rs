//! Command-line front end of the tomography laboratory: tomogram evaluation,
//! limit studies, reconstruction, quantum-classical comparison and the
//! self-test battery. Every command writes plot-ready CSV and JSON into the
//! output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod config;
pub mod limit;
pub mod reconstruct;
pub mod selftest;
pub mod tomogram;

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;
use tomolab_core::phase::io::write_atomic;
use tomolab_core::quantum::StateSpec;
use tomolab_core::{TomographyFrame, UniformGrid};

pub use config::{CommandKind, GridSpec, RunConfig, StudyParams, Target};

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable summary printed by the binary.
    pub lines: Vec<String>,
    /// `false` makes the process exit with a failure status.
    pub passed: bool,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            passed: true,
            ..Default::default()
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.command {
        CommandKind::Tomogram => tomogram::cmd_tomogram(cfg),
        CommandKind::Limit => limit::cmd_limit(cfg),
        CommandKind::Reconstruct => reconstruct::cmd_reconstruct(cfg),
        CommandKind::Compare => compare::cmd_compare(cfg),
        CommandKind::Selftest => selftest::cmd_selftest(cfg, &selftest::SelftestOptions::default()),
    }
}

/// Pretty JSON with a trailing newline, written atomically.
pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

/// Grid over the state's window in `X`, four samples per resolving panel.
pub fn auto_grid(state: &StateSpec, frame: TomographyFrame) -> Result<UniformGrid> {
    if frame.is_zero() {
        return Ok(UniformGrid::symmetric(1.0, 3)?);
    }
    let w = state.frame_window(frame);
    Ok(UniformGrid::with_max_step(w.lo, w.hi, w.max_panel / 4.0)?)
}
