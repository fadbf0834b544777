use thiserror::Error;

use crate::lp::LpError;

/// Errors shared by every solver in the crate.
///
/// Certified infeasibility of a single radius guess is not an error: solvers
/// report it as a value. `Infeasible` is only raised when the whole guessing
/// loop fails, i.e. even the largest candidate radius is rejected.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("capacity guard: {0}")]
    Capacity(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
