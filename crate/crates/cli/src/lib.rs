//! Command-line front end of `hydrocast`: study configuration,
//! rolling-origin studies over all forecasters, storage exceedance
//! analysis and report emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod report;
pub mod storage;
pub mod study;

pub use error::{CliError, Result};
