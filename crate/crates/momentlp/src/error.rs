//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-supplied configuration (barriers, degrees, piece layout, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A jump moment c(k) was requested beyond what the Lévy specification provides.
    #[error("jump moment c({k}) is not available: {detail}")]
    MissingMoment { k: u32, detail: String },

    /// An iterative numerical routine failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Matrix or moment-sequence dimensions do not match.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// The LP backend failed outright (not infeasible/unbounded, which are
    /// reported through `SolveStatus`).
    #[error("solver error: {0}")]
    Solver(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
