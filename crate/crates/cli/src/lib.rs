#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Command-line front end: configuration loading, subcommands and output files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
