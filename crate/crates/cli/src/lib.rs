//! Command-line surface of `modtau`: JSON run configs in, JSON reports and
//! CSV tables out.

pub mod commands;
pub mod config;
pub mod report;
pub mod table;

use std::fmt;

pub use commands::{execute, Outcome};
pub use config::{RunConfig, COMMANDS};
pub use report::{Report, Warning};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Malformed invocation or config; exit code 2.
    Usage(String),
    /// Reading or writing a file failed; exit code 2.
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
