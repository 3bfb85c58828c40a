//! File formats, parallel ensemble execution and the `micbench` command-line
//! front end for `micbench-core`.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fmt;
pub mod io;

pub use error::{CliError, Result};
