use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file content. `location` names the line (text formats) or
    /// byte offset (binary formats) where parsing stopped.
    #[error("{path}: {location}: {message}")]
    Parse {
        path: PathBuf,
        location: String,
        message: String,
    },

    #[error("empty signal")]
    EmptySignal,

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("need at least 2 samples, got {got}")]
    TooFewSamples { got: usize },

    #[error("degenerate signal: zero bin width")]
    Degenerate,

    #[error("{count} bins exceeds the limit of {limit}")]
    TooManyBins { count: usize, limit: usize },

    #[error("value {value} outside bin range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error(
        "empty bin: no rectangular feature matrix (bin {bin} of {count} has no samples); \
         pool more recordings for this state or set bin_width_override"
    )]
    EmptyBin { bin: usize, count: usize },

    #[error("state '{state}': {source}")]
    State {
        state: String,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("need >= 2 classes")]
    SingleClass,

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("{0}")]
    InvalidInput(String),

    /// Every violated configuration key, one message each.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Attach a health-state label to an error raised while processing that
    /// state.
    pub fn in_state(self, state: &str) -> Self {
        Error::State {
            state: state.to_string(),
            source: Box::new(self),
        }
    }

    /// Short machine-parsable category used by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } | Error::Json(_) => "parse",
            Error::EmptySignal
            | Error::NonFinite { .. }
            | Error::TooFewSamples { .. }
            | Error::Degenerate => "signal",
            Error::TooManyBins { .. } | Error::OutOfRange { .. } | Error::EmptyBin { .. } => {
                "feature"
            }
            Error::State { source, .. } => source.category(),
            Error::DimensionMismatch { .. } | Error::SingleClass | Error::NonFiniteLoss { .. } => {
                "train"
            }
            Error::InvalidInput(_) => "input",
            Error::Config(_) => "config",
        }
    }
}
