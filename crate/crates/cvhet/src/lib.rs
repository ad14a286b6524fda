//! File formats, deterministic parallel drivers and the `cvhet` command line
//! on top of [`cvhet_core`].

pub mod cli;
pub mod error;
pub mod parallel;
pub mod report;
pub mod samples_io;
pub mod state_spec;

pub use error::{CliError, Result};
