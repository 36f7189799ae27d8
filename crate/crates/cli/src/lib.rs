//! Library side of the `advcal` command-line tool.
//!
//! Every subcommand reads a JSON config (optionally overlaid by inline
//! flags), runs one engine operation and renders a CSV or JSON artifact.

pub mod commands;
pub mod output;
pub mod spec;

use std::fmt;

/// A failure that maps to exit status 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Engine(advcal_core::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<advcal_core::Error> for CliError {
    fn from(e: advcal_core::Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
