//! Library half of the `sdelab` binary: config loading with dotted-path
//! overrides, deterministic artifact formatting, and the command
//! implementations, kept out of main.rs so integration tests can call them
//! directly.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run_command, CliError, Command};
pub use config::{load_config, ExperimentConfig, Format, LoadedConfig};
pub use output::{emit, Artifact, Metadata};
