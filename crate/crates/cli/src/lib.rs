//! Library side of the `whitham` command-line tool: config parsing, the
//! scenario runners and the output writers.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod scenarios;
pub mod validate;

use whitham_core::Error;

/// Errors surfaced to the user, with the process exit code they map to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// `2` for bad input, `3` for failures of the numerics.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::Domain(_)
                | Error::Parameter(_)
                | Error::Configuration(_)
                | Error::NoBreaking
                | Error::Resolution { .. }
                | Error::Usage(_) => 2,
                Error::Conditioning(_)
                | Error::Numerical(_)
                | Error::ContinuationNeeded { .. }
                | Error::OutsideZone { .. }
                | Error::Degeneracy(_)
                | Error::RefineMesh(_) => 3,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
