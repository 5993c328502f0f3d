use std::path::{Path, PathBuf};

use hydrocast::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid input: {0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] hydrocast::Error),
    #[error("model `{model}` at origin {origin}: {source}")]
    Task {
        model: String,
        origin: usize,
        #[source]
        source: hydrocast::Error,
    },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            CliError::Config(_) => ErrorKind::Config,
            CliError::Io { .. } | CliError::Data(_) => ErrorKind::Data,
            CliError::Core(e) | CliError::Task { source: e, .. } => e.kind(),
        }
    }

    /// Process exit status: 1 configuration, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Config => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

macro_rules! from_core {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        })*
    };
}

from_core!(
    hydrocast::series::SeriesError,
    hydrocast::model::ModelError,
    hydrocast::ensemble::EnsembleError,
    hydrocast::scoring::ScoringError,
    hydrocast::benchmarks::BenchmarkError
);
