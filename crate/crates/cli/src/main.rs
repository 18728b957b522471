use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ks_cli::error::EXIT_OK;
use ks_cli::resum::ResumArgs;
use ks_cli::solve::SolveArgs;
use ks_cli::sweep::SweepArgs;
use ks_cli::verify::VerifyArgs;
use ks_cli::{CliResult, EvalConfig};

/// Kepler's equation by Kapteyn series, Stieltjes integrals and sequence
/// acceleration.
#[derive(Parser)]
#[command(name = "ks", version, about, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one (eps, M) instance and compare with the oracle.
    Solve(SolveArgs),
    /// Relative errors over an M grid, written as CSV.
    Sweep(SweepArgs),
    /// Partial sums and Weniger δ resummation of Σ z^m J_m(mε)/m.
    Resum(ResumArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = EvalConfig::from_env()?;
    match cli.command {
        Command::Solve(args) => {
            let report = ks_cli::solve::run(&args, &cfg)?;
            report
                .warnings
                .iter()
                .for_each(|w| eprintln!("warning: {w}"));
            println!("{report}");
        }
        Command::Sweep(args) => {
            let warnings = ks_cli::sweep::run(&args, &cfg)?;
            if !warnings.is_empty() {
                eprintln!("warning: {} ({} total)", warnings[0], warnings.len());
            }
        }
        Command::Resum(args) => println!("{}", ks_cli::resum::run(&args, &cfg)?),
        Command::Verify(args) => ks_cli::verify::run(&args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
