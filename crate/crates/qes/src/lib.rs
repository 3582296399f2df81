//! Command line, run configuration, output formats and parallel sweeps on
//! top of `qes-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod dump;
pub mod error;
pub mod format;
pub mod output;
pub mod verify;

pub use error::CliError;
