//! Command-line front end for `fockbound-core`: TOML experiment configs,
//! JSON run reports and CSV curve tables.

pub mod commands;
pub mod config;
pub mod profile;
pub mod report;

pub use commands::{execute, run, Cli, Command, RunArgs};
pub use config::{ConfigError, ExperimentConfig};
pub use report::Report;
