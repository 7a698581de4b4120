//! Scenario runner: parses declarative scenario files, runs the selected
//! checkers on the described family and writes JSON / CSV reports.

pub use nucont_core;

pub mod corpus;
pub mod emit;
pub mod runner;
pub mod scenario;

pub use emit::{emit_report, to_csv, to_json, Format};
pub use runner::{run_scenario, Report, RunOptions, Timing};
pub use scenario::{parse_scenario, Scenario};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numeric(#[from] nucont_core::Error),
}

impl CliError {
    /// 2 for configuration and I/O problems, 3 for numerical breakdowns.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 3,
            _ => 2,
        }
    }
}
