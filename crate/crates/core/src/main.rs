use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use avalanche::app::{self, AppError};
use avalanche::scenario::load_scenario;
use avalanche::verify;

/// Depth-averaged granular flow simulator (Savage-Hutter and mu(I)).
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Output directory, overriding the scenario's `[output] directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario with its own model.
    Run { scenario: PathBuf },
    /// Run a scenario under both models and write compare.csv.
    Compare { scenario: PathBuf },
    /// Run verification checks: `all` or a single check by name.
    Verify { suite: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Run { scenario } => load_scenario(scenario).map_err(AppError::from).and_then(|s| {
            let r = app::run_scenario(&s, out)?;
            println!("{}: {} frames written to {}", s.name, r.diagnostics.len(), r.directory.display());
            Ok(())
        }),
        Command::Compare { scenario } => load_scenario(scenario).map_err(AppError::from).and_then(|s| {
            let r = app::run_compare(&s, out)?;
            println!("{}: {} frames per model, {}", s.name, r.savage_hutter.diagnostics.len(), r.compare_csv.display());
            Ok(())
        }),
        Command::Verify { suite } => {
            return match verify::run_suite(suite, |o| println!("{o}")) {
                Ok(outcomes) => {
                    let failed = outcomes.iter().filter(|o| !o.passed).count();
                    println!("{} passed, {failed} failed", outcomes.len() - failed);
                    if failed == 0 {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
