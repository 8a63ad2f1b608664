//! Process-level error classification.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numeric failure.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable/invalid inputs, incompatible files.
    Input(String),
    /// Non-finite numbers where finite ones are required.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ddsam2_core::Error> for CliError {
    fn from(e: ddsam2_core::Error) -> Self {
        match e {
            ddsam2_core::Error::Numeric(msg) => CliError::Numeric(msg.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
