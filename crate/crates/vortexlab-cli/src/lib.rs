//! Batch front-end for the vortexlab studies: configuration, run
//! directories, plots, reports and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;
pub mod studies;

pub use config::ExperimentConfig;
pub use error::CliError;
