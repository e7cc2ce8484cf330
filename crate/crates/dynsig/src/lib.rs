//! File formats, output documents and the command-line front end for
//! [`dynsig_core`].

pub mod cli;
pub mod error;
pub mod formats;
pub mod report;

pub use error::{exit, CliError, CliResult};
