//! File formats, subcommands and rendering for the `toric` binary.

pub mod commands;
pub mod error;
pub mod format;
pub mod svg;
pub mod verify;

pub use error::CliError;
