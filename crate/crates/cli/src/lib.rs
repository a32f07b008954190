//! Command-line front end: TOML configuration, subcommand dispatch and
//! CSV/JSON output.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod dispatch;
pub mod error;

pub use cli::{Cli, Command};
pub use config::{parse_config, RunConfig};
pub use dispatch::{dispatch, Outcome};
pub use error::{CliError, Result};
