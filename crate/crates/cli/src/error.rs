//! Failures of a command and their exit codes.

use std::fmt;

use exact_interp::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or malformed input; exit code 1.
    Input(String),
    /// Well-formed input on which the computation cannot proceed; exit code 2.
    Precondition(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Precondition(_) => 2,
        }
    }

    /// Library errors raised while decoding a file are input errors whatever their kind.
    pub fn input(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "malformed input: {m}"),
            CliError::Precondition(m) => write!(f, "precondition failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } | Error::NonFinite(_) | Error::InvalidWeight { .. } | Error::InvalidArgument(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Precondition(e.to_string()),
        }
    }
}
