use thiserror::Error;

use crate::pcs::CubeId;
use crate::reduce::Judgment;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation was called with an id, index or parameter outside its domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unknown cube {0}")]
    UnknownCube(CubeId),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configured path, state or subset budget was exhausted. No partial result is returned.
    #[error("resource budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: usize },

    /// A theorem-gated step was requested without `force` and its checks failed.
    #[error("step refused: {}", .0.summary())]
    Refused(Box<Judgment>),

    #[error("certification failed: {0}")]
    Certification(String),

    /// A reduction report does not reproduce the claimed output.
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: msg.into(),
        }
    }

    pub(crate) fn budget(what: impl Into<String>, limit: usize) -> Self {
        Error::Budget {
            what: what.into(),
            limit,
        }
    }
}
