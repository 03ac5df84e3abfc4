use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Townships whose demand cannot be served even by a dedicated
    /// single-stop tour.
    #[error("infeasible instance: townships {0:?} cannot be served within one working day")]
    InfeasibleInstance(Vec<usize>),

    #[error("no tour in the pool can perform any of the remaining examinations")]
    NoProductiveTour,

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("instance has no coordinates")]
    MissingCoordinates,

    #[error("network error: {0}")]
    Network(String),

    #[error("malformed response: {0}")]
    MalformedResponse(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
