//! Library side of the `levyarea` command-line tool: file schemas and the
//! subcommands as plain functions.

pub mod commands;
pub mod error;
pub mod files;

pub use error::{CliError, Result};
pub use files::{ProblemFile, ResultFile};
