//! Configuration, orchestration and file output behind the `qprobe` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::CliError;
