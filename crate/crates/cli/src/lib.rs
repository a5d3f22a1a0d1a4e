//! Batch front end: configuration, suite orchestration and JSON reports.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use report::{Report, SuiteResult, SCHEMA};
pub use suites::{run, Command};
