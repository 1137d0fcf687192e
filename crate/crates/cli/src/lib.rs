//! Scenario files and subcommands of the `qsr` binary.

pub mod commands;
pub mod scenario_file;

pub use scenario_file::{ParseError, ScenarioFile};
