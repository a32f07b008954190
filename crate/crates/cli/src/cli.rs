use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "superengine",
    version,
    about = "Collective superabsorption/superradiance engine simulator"
)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out", global = true)]
    pub out: PathBuf,
    /// Suppress the summary and warnings.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Exact pulse from a Gibbs state with mean-field overlay.
    Pulse,
    /// Run the engine for `n_cycles` cycles.
    Cycle,
    /// Engine sweep over `sweep_axis` at `sweep_grid`.
    Sweep,
    /// Fit I₀ sech²((t − t_d)/τ) to a CSV column.
    Fit {
        /// CSV with a header row.
        input: PathBuf,
        #[arg(long, default_value = "t")]
        time_column: String,
        #[arg(long, default_value = "intensity")]
        column: String,
    },
}
