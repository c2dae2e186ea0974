//! The `mkfix` command line: `verify`, `solve` and `report`.

pub mod commands;
pub mod config;
pub mod trace;

pub use commands::{cmd_report, cmd_solve, cmd_verify, EXIT_ERROR, EXIT_OK, EXIT_VIOLATION};
pub use config::ProblemConfig;
