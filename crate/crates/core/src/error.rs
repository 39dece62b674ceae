use std::io;

use thiserror::Error;

/// Errors raised by the helicore library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the range an operation accepts.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operator was applied outside its domain, e.g. `curl_inv` on a
    /// field with a mean component.
    #[error("domain error: {0}")]
    Domain(String),

    /// A snapshot, CSV or config file failed validation.
    #[error("format error in {field}: {message}")]
    Format { field: String, message: String },

    /// Time integration produced non-finite or runaway values.
    #[error("blow-up at step {step} (t = {t}): {message}")]
    Blowup {
        step: usize,
        t: f64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
