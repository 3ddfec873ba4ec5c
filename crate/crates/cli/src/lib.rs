//! Command-line front end for the `hmqct` tool.

// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod grid;

pub use error::{CliError, Result};
