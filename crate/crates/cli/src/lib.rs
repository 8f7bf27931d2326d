//! Batch driver for the `tubelab` library: subcommands, TOML experiment
//! configs, JSON summaries and CSV tables, and the acceptance suite.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
