//! Command-line front end: configuration, persistent cache, report rendering.

pub mod cache;
pub mod config;
pub mod error;
pub mod run;
pub mod selftest;

pub use config::{Command, Format, RunConfig};
pub use error::CliError;
pub use run::{run_command, Outcome};
