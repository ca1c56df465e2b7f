//! Command-line front end for the interference-channel bound library:
//! configuration, the bound registry, sweeps, phase surfaces and figure
//! recipes. The `gic` binary is a thin wrapper over these functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod fmt;
pub mod reproduce;
pub mod run;
pub mod scenario;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("every requested upper bound is infeasible")]
    InfeasibleEverywhere,
}

impl CliError {
    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::InfeasibleEverywhere => 3,
        }
    }
}
