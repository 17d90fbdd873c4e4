//! Command-line front end: graph-state QFI, bundling, error-corrected GHZ
//! sweeps, authentication soundness reports and the cross-check suite.

pub mod checks;
pub mod commands;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("{0}")]
    Verify(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 1 verification failure, 2 usage or parse error, 3 domain precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}
