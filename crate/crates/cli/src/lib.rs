//! Configuration parsing and subcommand execution behind the `ermakov-qosc`
//! binary.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig};
pub use run::{run, thread_limit, write_atomic, Command, Fault, RunError, RunOutcome};
