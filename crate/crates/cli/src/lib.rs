//! Command-line front end for `pauliflow`: JSON configs in, CSV/JSON out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command, Emission, Options, Report};
pub use config::RunConfig;
pub use error::CliError;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
