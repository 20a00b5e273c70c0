//! Configuration handling and subcommands of the `twoway-cvqkd` binary.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

pub use commands::{run, Command, Report};
pub use config::{parse_config, RunConfig};
pub use error::{CliError, Result};
