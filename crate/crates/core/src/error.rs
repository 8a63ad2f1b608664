//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the numeric core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Two shapes that had to agree did not. Carries both.
    Shape {
        op: &'static str,
        left: [usize; 4],
        right: [usize; 4],
    },
    /// Invalid configuration value (even kernel, dilation < 1, ...).
    Config { op: &'static str, msg: String },
    /// Invalid prompt (degenerate box, empty mask).
    Prompt(String),
    /// Unknown parameter-freezing policy.
    Policy(String),
    /// Non-finite value where a finite one is required.
    Numeric(String),
    /// Empty input where at least one element is required.
    Empty(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape { op, left, right } => {
                write!(f, "{op}: shape mismatch {left:?} vs {right:?}")
            }
            Error::Config { op, msg } => write!(f, "{op}: {msg}"),
            Error::Prompt(msg) => write!(f, "invalid prompt: {msg}"),
            Error::Policy(name) => write!(f, "unknown policy: {name}"),
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            Error::Empty(what) => write!(f, "{what} must be nonempty"),
        }
    }
}

impl core::error::Error for Error {}
