//! Batch analysis of quantum resource theory specs: preorders, conversion
//! rates, resource measures and the theorem suite, as deterministic reports.

pub mod commands;
pub mod config;
pub mod report;
pub mod run;
pub mod theorems;

pub use config::{parse_commands, Command, ConfigError, OutputFormat, RunConfig};
pub use report::MeasureReport;
pub use run::{execute, run, Outcome, RunError};
