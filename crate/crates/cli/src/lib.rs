//! Experiment harness for the `mogdm` solver: configuration, runs, result
//! files and performance profiles.

pub mod app;
pub mod config;
pub mod output;
pub mod profile;
pub mod run;

pub use config::ExperimentConfig;
