use std::path::PathBuf;

use crate::formats::FormatError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const NO_VALID_PARSE: i32 = 3;
    pub const INVARIANT: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: FormatError },
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dynsig_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn input(path: impl Into<PathBuf>, source: FormatError) -> Self {
        Self::Input { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use dynsig_core::Error as E;
        match self {
            Self::Io { .. } | Self::Input { .. } | Self::Usage(_) => exit::INPUT,
            Self::Core(E::NoValidParse) => exit::NO_VALID_PARSE,
            Self::Core(E::InvariantViolation(_)) => exit::INVARIANT,
            Self::Core(
                E::DivergentWeights | E::CyclicMachine | E::EnumerationTooLarge(_) | E::Malformed(_),
            ) => exit::RUNTIME,
            // everything else stems from a bad document or flag value
            Self::Core(_) => exit::INPUT,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
