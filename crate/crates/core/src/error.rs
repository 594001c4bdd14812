use std::io;

use thiserror::Error;

/// Errors raised while building topologies, routing, or running experiments.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed an out-of-range or unknown argument.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The request is well-formed but meaningless for this object.
    #[error("domain error: {0}")]
    Domain(String),

    /// The construction would exceed the configured node limit.
    #[error("capacity exceeded: {what} needs {requested} nodes, limit is {limit}")]
    Capacity {
        what: String,
        requested: u64,
        limit: u64,
    },

    /// Malformed textual input.
    #[error("input error at line {line}: {message}")]
    Input { line: usize, message: String },

    /// A checked invariant failed at run time.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
