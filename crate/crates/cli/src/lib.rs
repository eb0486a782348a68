//! Command-line front end for the `qfirob` experiments.

pub mod config;
pub mod experiments;
pub mod matrix_io;
pub mod output;

pub use config::{parse_config, ConfigError, Experiment, RunConfig};
pub use experiments::{run, CliError, Outcome};
