//! Scenario-driven runner for the `ncg` command line tool.

pub mod runner;
pub mod scenario;
