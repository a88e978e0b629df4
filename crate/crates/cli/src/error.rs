use std::fmt;

use dak_core::Error;

/// A failure together with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad scenario or flags.
    Validation(String),
    /// Exact mode would exceed its size cap.
    Cap(String),
    /// A property check failed.
    Verification(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Cap(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Validation(m) => ("invalid input", m),
            CliError::Cap(m) => ("cap exceeded", m),
            CliError::Verification(m) => ("verification failed", m),
            CliError::Io(m) => ("i/o error", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_cap() {
            CliError::Cap(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<dak_core::graph::GraphError> for CliError {
    fn from(e: dak_core::graph::GraphError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
