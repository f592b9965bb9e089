use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tomolab::config::{parse_grid, parse_hbars, parse_pair, parse_usize_list};
use tomolab::{run, CommandKind, RunConfig, Target};

#[derive(Parser)]
#[command(name = "tomolab", version, about = "Symplectic tomograms of classical and quantum states")]
struct Cli {
    /// Replay a run from a config file or from any sidecar/report it wrote.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct Common {
    /// State descriptor, e.g. `ho:n=3`, `coherent:re=1,im=0`, `cat:even,re=1,im=0`,
    /// `superpos:n=0,m=1`, `box:n=5,L=1`, `custom:<psi.csv>`.
    #[arg(long)]
    state: Option<String>,
    /// Frame `mu,nu`.
    #[arg(long, allow_hyphen_values = true)]
    frame: Option<String>,
    /// Frame `s,theta`: `mu = s cos theta`, `nu = s^-1 sin theta`.
    #[arg(long, allow_hyphen_values = true)]
    scaling: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// X grid `min,max,count`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "tomolab-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Wigner,
    Density,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one tomogram.
    Tomogram {
        #[command(flatten)]
        common: Common,
    },
    /// Run a convergence study.
    Limit {
        /// planck-delta, interference, cat-interference, ehrenfest-coherent,
        /// ehrenfest-cat, ehrenfest-box or ehrenfest-oscillator.
        study: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Level sequence, e.g. `25,50,100`.
        #[arg(long)]
        ns: Option<String>,
        /// `start:end:geometric` or a comma-separated list.
        #[arg(long)]
        hbars: Option<String>,
        /// Coherent amplitude `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        /// Well length.
        #[arg(long)]
        length: Option<f64>,
        /// Planck scaling exponent for custom profiles.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<f64>,
        /// Centre of the limiting delta.
        #[arg(long, allow_hyphen_values = true)]
        center: Option<f64>,
        /// Frame `mu,nu` for the box study; repeat for several.
        #[arg(long = "frames", allow_hyphen_values = true)]
        frames: Vec<String>,
    },
    /// Rebuild the Wigner function or density matrix from tomograms.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "wigner")]
        output: TargetArg,
        /// Declared support `q_half,p_half`.
        #[arg(long)]
        support: Option<String>,
    },
    /// Distance between quantum and classical tomograms per frame.
    Compare {
        #[command(flatten)]
        common: Common,
        /// `oscillator`, `box[:L=<f>]` or `point[:q=<f>,p=<f>]`.
        #[arg(long, default_value = "oscillator")]
        classical: String,
        /// Classical energy; defaults to the state's mean energy.
        #[arg(long)]
        energy: Option<f64>,
        /// Frame `mu,nu`; repeat for several.
        #[arg(long = "frames", allow_hyphen_values = true)]
        frames: Vec<String>,
        /// Averaging half-width; the default follows the state's oscillation.
        #[arg(long)]
        window: Option<f64>,
    },
    /// Run the invariant battery.
    Selftest {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value = "tomolab-out")]
        out: PathBuf,
    },
}

fn apply_common(cfg: &mut RunConfig, c: &Common) -> Result<()> {
    cfg.state = c.state.clone();
    cfg.frame = c.frame.as_deref().map(|s| parse_pair("--frame", s)).transpose()?;
    cfg.scaling = c.scaling.as_deref().map(|s| parse_pair("--scaling", s)).transpose()?;
    cfg.hbar = c.hbar;
    cfg.grid = c.grid.as_deref().map(parse_grid).transpose()?;
    cfg.out = c.out.clone();
    Ok(())
}

fn parse_frames(list: &[String]) -> Result<Vec<[f64; 2]>> {
    list.iter().map(|s| parse_pair("--frames", s)).collect()
}

fn build_config(cli: Cli) -> Result<RunConfig> {
    if let Some(path) = &cli.config {
        if cli.command.is_some() {
            bail!("--config replays a stored run; do not combine it with a subcommand");
        }
        return RunConfig::load(path);
    }
    let Some(command) = cli.command else {
        bail!("no command given; run `tomolab --help`");
    };
    let cfg = match command {
        Command::Tomogram { common } => {
            let mut cfg = RunConfig::new(CommandKind::Tomogram);
            apply_common(&mut cfg, &common)?;
            cfg
        }
        Command::Limit {
            study,
            common,
            n,
            m,
            ns,
            hbars,
            alpha,
            q,
            p,
            length,
            gamma,
            shift,
            center,
            frames,
        } => {
            let mut cfg = RunConfig::new(CommandKind::Limit);
            apply_common(&mut cfg, &common)?;
            cfg.study = Some(study);
            cfg.params.n = n;
            cfg.params.m = m;
            cfg.params.ns = ns.as_deref().map(|s| parse_usize_list("--ns", s)).transpose()?;
            cfg.params.hbars = hbars.as_deref().map(parse_hbars).transpose()?;
            cfg.params.alpha = alpha.as_deref().map(|s| parse_pair("--alpha", s)).transpose()?;
            cfg.params.q = q;
            cfg.params.p = p;
            cfg.params.length = length;
            cfg.params.gamma = gamma;
            cfg.params.shift = shift;
            cfg.params.center = center;
            cfg.frames = parse_frames(&frames)?;
            cfg
        }
        Command::Reconstruct { common, output, support } => {
            let mut cfg = RunConfig::new(CommandKind::Reconstruct);
            apply_common(&mut cfg, &common)?;
            cfg.target = Some(match output {
                TargetArg::Wigner => Target::Wigner,
                TargetArg::Density => Target::Density,
            });
            cfg.support = support.as_deref().map(|s| parse_pair("--support", s)).transpose()?;
            cfg
        }
        Command::Compare {
            common,
            classical,
            energy,
            frames,
            window,
        } => {
            let mut cfg = RunConfig::new(CommandKind::Compare);
            apply_common(&mut cfg, &common)?;
            cfg.classical = Some(classical);
            cfg.energy = energy;
            cfg.frames = parse_frames(&frames)?;
            cfg.window = window;
            cfg
        }
        Command::Selftest { quick, out } => {
            let mut cfg = RunConfig::new(CommandKind::Selftest);
            cfg.quick = quick;
            cfg.out = out;
            cfg
        }
    };
    Ok(cfg)
}

/// `TOMOLAB_THREADS` caps the worker pool; `0` or unset leaves the default.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("TOMOLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("TOMOLAB_THREADS must be a non-negative integer, got `{v}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| build_config(cli)).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
