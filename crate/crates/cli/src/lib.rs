//! Library side of the `mils` command: estimator setup, subcommands and the
//! evaluation harness.

pub mod commands;
pub mod estimator;
pub mod eval;

use thiserror::Error;

/// Bad invocation; the binary exits with status 2.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);
