//! Error type shared across the crate.

use std::fmt;

/// Errors produced by simulation, statistics and experiment orchestration.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented domain restriction.
    Domain(String),
    /// An experiment configuration failed validation.
    Config(String),
    /// A per-path failure inside a replicated experiment, with the
    /// offending path index attached.
    Path { index: usize, source: Box<Error> },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn at_path(self, index: usize) -> Self {
        Error::Path {
            index,
            source: Box::new(self),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Path { index, source } => write!(f, "path {index}: {source}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

/// Finite and strictly positive; the standard guard for widths, steps and
/// horizons (rejects NaN and infinities).
pub(crate) fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}
