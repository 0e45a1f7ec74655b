//! Command-line harness: configuration merging, subcommand dispatch and
//! record output.

pub mod config;
pub mod records;
pub mod run;

pub use config::{parse_config, ConfigError, MapChoice, Mode, RunConfig};
pub use run::{run, Outcome, EXIT_ASSERTION, EXIT_FAILURE, EXIT_PASS};
