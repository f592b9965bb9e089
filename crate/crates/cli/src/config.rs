//! Run configuration and flag parsing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tomolab_core::limits::geometric_sequence;
use tomolab_core::quantum::{parse_state, StateSpec};
use tomolab_core::{TomographyFrame, UniformGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Tomogram,
    Limit,
    Reconstruct,
    Compare,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Wigner,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn grid(&self) -> Result<UniformGrid> {
        Ok(UniformGrid::new(self.min, self.max, self.count)?)
    }
}

/// Parameters of the convergence studies. Unset fields take the study's
/// default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbars: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
}

fn default_hbar() -> f64 {
    1.0
}

fn default_out() -> PathBuf {
    PathBuf::from("tomolab-out")
}

/// Everything a run depends on. Every output sidecar embeds this record, and
/// `--config` replays it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    /// `(mu, nu)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<[f64; 2]>,
    /// `(s, theta)`, the alternative to `frame`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<[f64; 2]>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<String>,
    #[serde(default)]
    pub params: StudyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    /// Declared `(q_half, p_half)` support for reconstruction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
    /// Half-width of the comparison average; `0` disables it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default)]
    pub quick: bool,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            state: None,
            frame: None,
            scaling: None,
            frames: Vec::new(),
            hbar: 1.0,
            grid: None,
            study: None,
            params: StudyParams::default(),
            classical: None,
            energy: None,
            target: None,
            support: None,
            window: None,
            quick: false,
            out: default_out(),
        }
    }

    /// Reads a config file. Sidecars and reports written by a run carry the
    /// config under a `config` key and are accepted as well.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))?;
        if let Some(inner) = value.get_mut("config").map(serde_json::Value::take) {
            value = inner;
        }
        let cfg: RunConfig = serde_json::from_value(value).with_context(|| format!("invalid run config in {}", path.display()))?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Frame from `frame` or `scaling`; at most one may be given.
    pub fn frame_opt(&self) -> Result<Option<TomographyFrame>> {
        match (self.frame, self.scaling) {
            (Some(_), Some(_)) => bail!("give either --frame mu,nu or --scaling s,theta, not both"),
            (Some([mu, nu]), None) => Ok(Some(TomographyFrame::new(mu, nu))),
            (None, Some([s, theta])) => Ok(Some(TomographyFrame::from_scaling(s, theta)?)),
            (None, None) => Ok(None),
        }
    }

    pub fn frame_or(&self, default: TomographyFrame) -> Result<TomographyFrame> {
        Ok(self.frame_opt()?.unwrap_or(default))
    }

    pub fn require_frame(&self) -> Result<TomographyFrame> {
        self.frame_opt()?
            .ok_or_else(|| anyhow::anyhow!("this command needs --frame mu,nu or --scaling s,theta"))
    }

    pub fn parse_state(&self, default: Option<&str>) -> Result<StateSpec> {
        let descriptor = match (&self.state, default) {
            (Some(s), _) => s.as_str(),
            (None, Some(d)) => d,
            (None, None) => bail!("this command needs --state <descriptor>"),
        };
        parse_state(descriptor, self.hbar).map_err(|e| annotate("--state", descriptor, &e.to_string()))
    }

    /// Checks the invariants shared by all commands and creates the output
    /// directory.
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            bail!("hbar must be positive, got {}", self.hbar);
        }
        self.frame_opt()?;
        if let Some(g) = &self.grid {
            g.grid().context("invalid --grid")?;
        }
        if let Some(w) = self.window {
            if !(w >= 0.0) {
                bail!("--window must be non-negative, got {w}");
            }
        }
        fs::create_dir_all(&self.out).with_context(|| format!("cannot create output directory {}", self.out.display()))?;
        let probe = self.out.join(".tomolab-write-probe");
        fs::write(&probe, b"").with_context(|| format!("output directory {} is not writable", self.out.display()))?;
        fs::remove_file(&probe)?;
        Ok(())
    }
}

/// Error for `input` (the value of `flag`) pointing at the first token quoted
/// in `message` with backticks, when the token occurs in the input.
pub fn annotate(flag: &str, input: &str, message: &str) -> anyhow::Error {
    let quoted = message
        .split('`')
        .skip(1)
        .step_by(2)
        .find(|tok| !tok.is_empty() && *tok != input && input.contains(*tok));
    match quoted.and_then(|tok| input.find(tok).map(|pos| (tok, pos))) {
        Some((tok, pos)) => anyhow::anyhow!(
            "{flag} `{input}`: {message}\n  {input}\n  {}{} (position {})",
            " ".repeat(input[..pos].chars().count()),
            "^".repeat(tok.chars().count().max(1)),
            input[..pos].chars().count() + 1
        ),
        None => anyhow::anyhow!("{flag} `{input}`: {message}"),
    }
}

/// Comma-separated tokens with their 1-based character positions.
fn tokens(input: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in input.char_indices() {
        if c == ',' {
            out.push((start, &input[start..i]));
            start = i + 1;
        }
    }
    out.push((start, &input[start..]));
    out.into_iter().map(|(b, t)| (input[..b].chars().count() + 1, t)).collect()
}

fn token_error(flag: &str, input: &str, pos: usize, tok: &str, what: &str) -> anyhow::Error {
    anyhow::anyhow!(
        "{flag} `{input}`: `{tok}` at position {pos} is not {what}\n  {input}\n  {}{}",
        " ".repeat(pos - 1),
        "^".repeat(tok.chars().count().max(1))
    )
}

pub fn parse_f64_list(flag: &str, input: &str) -> Result<Vec<f64>> {
    tokens(input)
        .into_iter()
        .map(|(pos, tok)| {
            tok.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| token_error(flag, input, pos, tok, "a finite number"))
        })
        .collect()
}

pub fn parse_usize_list(flag: &str, input: &str) -> Result<Vec<usize>> {
    tokens(input)
        .into_iter()
        .map(|(pos, tok)| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| token_error(flag, input, pos, tok, "a non-negative integer"))
        })
        .collect()
}

/// `a,b` as a pair.
pub fn parse_pair(flag: &str, input: &str) -> Result<[f64; 2]> {
    let v = parse_f64_list(flag, input)?;
    if v.len() != 2 {
        bail!("{flag} `{input}`: expected two comma-separated numbers, got {}", v.len());
    }
    Ok([v[0], v[1]])
}

/// `min,max,count`.
pub fn parse_grid(input: &str) -> Result<GridSpec> {
    let toks = tokens(input);
    if toks.len() != 3 {
        bail!("--grid `{input}`: expected min,max,count, got {} fields", toks.len());
    }
    let num = |(pos, tok): (usize, &str)| {
        tok.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| token_error("--grid", input, pos, tok, "a finite number"))
    };
    let (pos, tok) = toks[2];
    let count = tok
        .trim()
        .parse::<usize>()
        .map_err(|_| token_error("--grid", input, pos, tok, "a point count"))?;
    let spec = GridSpec {
        min: num(toks[0])?,
        max: num(toks[1])?,
        count,
    };
    spec.grid().map_err(|e| anyhow::anyhow!("--grid `{input}`: {e}"))?;
    Ok(spec)
}

/// `a:b:geometric` (both ends included, ratio near 1/2) or an explicit
/// comma-separated list.
pub fn parse_hbars(input: &str) -> Result<Vec<f64>> {
    if !input.contains(':') {
        return parse_f64_list("--hbars", input);
    }
    let parts: Vec<&str> = input.split(':').collect();
    if parts.len() != 3 {
        bail!("--hbars `{input}`: expected start:end:geometric");
    }
    let mut pos = 1;
    let mut ends = [0.0; 2];
    for (k, part) in parts[..2].iter().enumerate() {
        ends[k] = part
            .parse::<f64>()
            .map_err(|_| token_error("--hbars", input, pos, part, "a number"))?;
        pos += part.chars().count() + 1;
    }
    if parts[2] != "geometric" {
        return Err(token_error(
            "--hbars",
            input,
            pos,
            parts[2],
            "a known spacing (only `geometric` is supported)",
        ));
    }
    Ok(geometric_sequence(ends[0], ends[1])?)
}
