//! File formats, run configuration and verification suites on top of
//! `sonine-core`. The `sonine` binary is a thin layer over [`commands`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod suite;

pub use config::RunConfig;
pub use error::CliError;
pub use report::{CheckRecord, VerifyReport};
