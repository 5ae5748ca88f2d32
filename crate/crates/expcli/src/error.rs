use std::path::PathBuf;

use qdcascade::CascadeError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, ExpError>;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{source} (at {context})")]
    Point {
        context: String,
        #[source]
        source: CascadeError,
    },

    #[error(transparent)]
    Core(#[from] CascadeError),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("validation failed: {0}")]
    Validation(String),
}

impl ExpError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExpError::Io { path: path.into(), source }
    }

    /// Process exit code: 1 parameter/parse, 2 numerical validity, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Config(_) => 1,
            ExpError::Point { source, .. } | ExpError::Core(source) => {
                if source.is_parameter_error() {
                    1
                } else {
                    2
                }
            }
            ExpError::Validation(_) => 2,
            ExpError::Io { .. } => 3,
        }
    }
}
