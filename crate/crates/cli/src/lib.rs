//! Command-line front end for the rule-set evolution engine: dataset and
//! fold file IO, model archives, the cross-validation harness, Pareto
//! exports, and the subcommand implementations.

pub mod archive;
pub mod commands;
pub mod config;
pub mod error;
pub mod harness;
pub mod loader;
pub mod pareto;
pub mod svg;

pub use error::CliError;
