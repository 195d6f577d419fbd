use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpillError>;

/// Errors raised anywhere in the pipeline.
///
/// Each variant maps to one of the CLI exit codes through [`SpillError::exit_code`].
#[derive(Debug, Error)]
pub enum SpillError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{stage}: cannot read {path}: {source}")]
    Io {
        stage: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{stage}: {path}:{line}: {msg}")]
    Malformed {
        stage: &'static str,
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("degenerate day: {0}")]
    DegenerateDay(String),

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("not enough observations: need more than {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("collinear window: regressor matrix is rank deficient")]
    CollinearWindow,

    #[error("non-finite value in input data at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("variable {index} has non-positive error variance {value}")]
    NonPositiveVariance { index: usize, value: f64 },

    #[error("variable {index} has zero forecast error variance")]
    ZeroRowSum { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bootstrap failed after {attempts} attempts ({successes} successful replicates)")]
    BootstrapExhausted { attempts: usize, successes: usize },

    #[error("window ending {date}: {source}")]
    Window {
        date: NaiveDate,
        #[source]
        source: Box<SpillError>,
    },

    #[error("{what}: {source}")]
    Context {
        what: String,
        #[source]
        source: Box<SpillError>,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SpillError>,
    },
}

impl SpillError {
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ (SpillError::Stage { .. }
            | SpillError::Io { .. }
            | SpillError::Malformed { .. }) => e,
            other => SpillError::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub fn context(self, what: impl Into<String>) -> Self {
        SpillError::Context {
            what: what.into(),
            source: Box::new(self),
        }
    }

    pub fn at_window(self, date: NaiveDate) -> Self {
        SpillError::Window {
            date,
            source: Box::new(self),
        }
    }

    /// Process exit code: 2 config, 3 data, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            SpillError::Config(_) | SpillError::InvalidArgument(_) => 2,
            SpillError::Io { .. }
            | SpillError::Malformed { .. }
            | SpillError::Data(_)
            | SpillError::DegenerateDay(_)
            | SpillError::EmptyResult(_)
            | SpillError::NonFinite { .. }
            | SpillError::TooFewObservations { .. } => 3,
            SpillError::CollinearWindow
            | SpillError::NonPositiveVariance { .. }
            | SpillError::ZeroRowSum { .. }
            | SpillError::BootstrapExhausted { .. } => 4,
            SpillError::Window { source, .. }
            | SpillError::Context { source, .. }
            | SpillError::Stage { source, .. } => source.exit_code(),
        }
    }
}
