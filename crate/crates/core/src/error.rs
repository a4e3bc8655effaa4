use std::io;

use thiserror::Error;

pub type Result<T, E = DipError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DipError {
    #[error("{0}")]
    Config(String),

    #[error("layer `{layer}`: expected {expected}, got {actual}")]
    Shape {
        layer: String,
        expected: String,
        actual: String,
    },

    #[error("corrupt genome: {0}")]
    CorruptGenome(String),

    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    #[error("{0}")]
    Logic(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl DipError {
    pub fn config(msg: impl Into<String>) -> Self {
        DipError::Config(msg.into())
    }

    pub fn logic(msg: impl Into<String>) -> Self {
        DipError::Logic(msg.into())
    }

    pub fn shape(layer: impl Into<String>, expected: impl ToString, actual: impl ToString) -> Self {
        DipError::Shape {
            layer: layer.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        DipError::Io {
            context: context.into(),
            source,
        }
    }

    /// Stable machine-parsable class used as the `error[<code>]` prefix on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            DipError::Config(_) => "config",
            DipError::Shape { .. } => "shape",
            DipError::CorruptGenome(_) => "corrupt-genome",
            DipError::CorruptCheckpoint(_) => "corrupt-checkpoint",
            DipError::Logic(_) => "logic",
            DipError::Evaluation(_) => "evaluation",
            DipError::Io { .. } => "io",
            DipError::Usage(_) => "usage",
        }
    }
}
