//! Command-line front end: argument parsing, subcommands and CSV artifacts.

pub mod args;
pub mod commands;
pub mod output;

pub use args::{Cli, Command};
pub use commands::{exit_code, run, status_label};
