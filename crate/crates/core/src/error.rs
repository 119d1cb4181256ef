use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error class, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Runtime,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("malformed annotation record {index}: {message}")]
    Annotation { index: usize, message: String },

    #[error("degenerate feature: {0}")]
    DegenerateFeature(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty class {0}: no training samples")]
    EmptyClass(usize),

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("value {value} outside curve range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Parse { .. }
            | Error::Annotation { .. }
            | Error::DegenerateFeature(_)
            | Error::EmptyClass(_)
            | Error::Io { .. }
            | Error::Json(_)
            | Error::Csv(_) => ErrorKind::Data,
            Error::InvalidInput(_) | Error::Divergence { .. } | Error::OutOfRange { .. } => {
                ErrorKind::Runtime
            }
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
