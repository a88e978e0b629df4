use thiserror::Error;

use crate::graph::GraphError;
use crate::maps::MapError;
use crate::pdm::PdmError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Pdm(#[from] PdmError),
    #[error("item count must be at least 1")]
    NoItems,
    #[error("exact mode infeasible: {what} ({count}) exceeds the cap of {cap}; use Monte Carlo mode")]
    CapExceeded { what: &'static str, count: u128, cap: u128 },
    #[error("{0} has no Monte Carlo mode")]
    ExactOnly(&'static str),
    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    /// True when the failure is a size cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::Map(MapError::CapExceeded { .. }))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
