use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    /// Input does not follow the expected text or binary layout.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("malformed record '{id}': {message}")]
    MalformedRecord { id: String, message: String },

    /// Parsed content violates a model invariant (e.g. an asymmetric matrix).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("value {value} for {what} is outside the signed 8-bit range")]
    Range { what: String, value: i64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Lane count, element width, or backend do not fit together.
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn argument(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }
}
