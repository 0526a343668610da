//! Configuration, persistence and the subcommands behind the `bnls` binary.

// negated comparisons reject NaN together with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;

pub use config::Config;
pub use error::{CliError, Result};
