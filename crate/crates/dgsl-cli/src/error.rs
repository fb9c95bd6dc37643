//! Failure classification for the command line.
//!
//! The numeric exit code is part of the CLI contract: 0 success, 1 usage or
//! configuration error, 2 data error (unreadable/unparsable/inconsistent
//! inputs), 3 numerical failure inside a solve.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config file {}: {source}", path.display())]
    Config { path: PathBuf, source: dgsl::Error },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A library error that names a specific input file (parse errors carry
    /// line numbers but not file names).
    #[error("{}: {source}", path.display())]
    DataFile { path: PathBuf, source: dgsl::Error },

    #[error(transparent)]
    Data(dgsl::Error),

    #[error(transparent)]
    Numerical(dgsl::Error),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            CliError::Io { .. } | CliError::DataFile { .. } | CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Trial { source, .. } => source.exit_code(),
        }
    }
}

/// Sorts library errors into the exit-code classes. Parameter problems are
/// the user's flags (exit 1); numerical breakdowns get their own code so
/// scripted sweeps can tell them apart from bad inputs.
impl From<dgsl::Error> for CliError {
    fn from(e: dgsl::Error) -> Self {
        use dgsl::Error as E;
        match e {
            E::InvalidParam { .. } | E::KOutOfRange { .. } => CliError::Usage(e.to_string()),
            E::NotPositiveDefinite
            | E::DegenerateDenominator(_)
            | E::NonFiniteObjective { .. }
            | E::ZeroDegree { .. } => CliError::Numerical(e),
            _ => CliError::Data(e),
        }
    }
}
