use std::process::ExitCode;

use clap::Parser;
use superengine_cli::config::parse_override;
use superengine_cli::{dispatch, Cli, Result};

fn run(cli: &Cli) -> Result<()> {
    let overrides = cli
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>>>()?;
    let outcome = dispatch(&cli.command, cli.config.as_deref(), &overrides, &cli.out)?;
    if !cli.quiet {
        for w in &outcome.warnings {
            eprintln!("warning: {w}");
        }
        for line in &outcome.summary {
            println!("{line}");
        }
        for f in &outcome.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
