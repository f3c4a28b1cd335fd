//! Scenario runner for the `pacman` binary.

pub mod output;
pub mod run;
pub mod scenario;
