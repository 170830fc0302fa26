//! Standard-library companion to `mfplan-core`: configuration, episode logs,
//! estimator weight files, the benchmark harness and the `mfplan` command.

pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod logs;
pub mod numfmt;
pub mod pipeline;
pub mod verify;
pub mod weights;

pub use config::Config;
pub use error::CliError;
