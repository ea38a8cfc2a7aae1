//! Error type shared by all planning modules.

use thiserror::Error;

/// Errors produced by the planning engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition or type invariant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A lookup fell outside the domain of a tabulated model (no extrapolation).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation that requires a positive azimuth spread was called with
    /// sigma = 0; callers wanting the zero-spread limit must use the dedicated
    /// limit handling instead.
    #[error("degenerate azimuth spread: {0}")]
    DegenerateSpread(String),

    /// A numerical procedure failed to converge or the system was singular.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A text input could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
