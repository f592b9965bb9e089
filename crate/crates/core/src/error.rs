use thiserror::Error;

#[derive(Debug, Error)]
pub enum TomoError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frame (mu, nu) = (0, 0) is not allowed here")]
    ZeroFrame,

    #[error("frames differ: ({0}, {1}) vs ({2}, {3})")]
    FrameMismatch(f64, f64, f64, f64),

    #[error("tomogram has an empty grid and no delta atoms")]
    EmptyTomogram,

    #[error("support exceeds the grid: mass deficit {deficit:.3e}")]
    MassDeficit { deficit: f64 },

    #[error("input is not Hermitian: residual {residual:.3e}")]
    NonHermitian { residual: f64 },

    #[error("{axis} spacing {spacing} exceeds the Nyquist limit {limit} for the declared bandwidth")]
    Nyquist { axis: &'static str, spacing: f64, limit: f64 },

    #[error("missing nu-slice: nu = {nu} is required")]
    MissingNuSlice { nu: f64 },

    #[error("oscillatory quadrature needs {required} nodes (budget {budget}) to keep 8 nodes per phase period")]
    PhaseResolution { required: usize, budget: usize },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, TomoError>;
