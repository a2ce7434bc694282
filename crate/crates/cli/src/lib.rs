//! Configuration, experiment orchestration, audits and result files for
//! the `qecnet` command-line tool.

pub mod analysis;
pub mod audit;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use experiment::{run_experiment, Experiment, ExperimentResult};
