use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the samplers, formulas and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument falls outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A single-antenna node has no null space to carry artificial noise.
    #[error("no null space: a channel of length {0} leaves no room for artificial noise (need at least 2 antennas)")]
    NoNullSpace(usize),

    /// Paired inputs disagree in length.
    #[error("length mismatch: {left} gains vs {right} distances")]
    LengthMismatch { left: usize, right: usize },

    /// A configuration field violates its invariant.
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    /// A sweep grid is empty or not strictly increasing.
    #[error("invalid sweep grid for `{axis}`: {message}")]
    Grid { axis: String, message: String },

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
