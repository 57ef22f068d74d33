use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange { what: &'static str, value: String, range: String },
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("oracle guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("corrupt checkpoint {path}: line {line}: {reason}")]
    CorruptCheckpoint { path: PathBuf, line: usize, reason: String },
    #[error("survey interrupted after {completed_blocks} newly completed blocks")]
    Interrupted { completed_blocks: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: impl ToString, range: impl ToString) -> Self {
        Error::OutOfRange { what, value: value.to_string(), range: range.to_string() }
    }
}
