use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical contract (Hermiticity, positivity, trace preservation) does not hold.
    #[error("numerical contract violated: {0}")]
    Contract(String),

    #[error("causal map construction failed: {0}")]
    Construction(String),

    #[error("outcome {outcome} on {system} has probability {probability:e}")]
    ZeroProbability {
        system: String,
        outcome: i8,
        probability: f64,
    },

    #[error("reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
