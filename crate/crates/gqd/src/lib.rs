//! File formats, text reports and the command-line driver built on
//! [`gqd_core`].

pub mod cli;
pub mod formats;
pub mod report;

/// Failure of a command, split by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// bad flags, unreadable or invalid input files, unknown names
    #[error("{0}")]
    Input(String),
    /// an internal numerical contract did not hold
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<gqd_core::Error> for CliError {
    fn from(e: gqd_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}
