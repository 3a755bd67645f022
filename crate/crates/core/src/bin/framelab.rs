use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use framelab::builtins;
use framelab::cli::{self, ExperimentConfig, Kind};
use framelab::Error;

#[derive(Parser)]
#[command(name = "framelab", version, about = "Frames as operator orbits: experiments and reports")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML or JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized checks (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Carleson orbit frames: ratio test, bounds, excess.
    Carleson(RunArgs),
    /// Representation operator of a frame viewed as an orbit.
    Represent(RunArgs),
    /// Approximating suborbit of scaled shifts with error certificates.
    Approximate(RunArgs),
    /// Hypercyclic-vector plan for a Rolewicz operator.
    Hypercyclic(RunArgs),
    /// Orbit decay and finite-section conditioning diagnostics.
    Diagnostics(RunArgs),
    /// Print the builtin frames.
    ListBuiltins,
}

fn execute(kind: Kind, args: RunArgs) -> Result<bool, Error> {
    let config = ExperimentConfig::load(&args.config)?.with_overrides(Some(kind), args.out, args.seed)?;
    let report = cli::run(&config)?;
    let dir = config.output_dir();
    cli::write_outputs(&report, &dir)?;
    for v in &report.verdicts {
        eprintln!("{} {}: {}", if v.pass { "pass" } else { "FAIL" }, v.invariant, v.detail);
    }
    eprintln!("report written to {}", dir.join("report.json").display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let (kind, args) = match Args::parse().command {
        Command::ListBuiltins => {
            for (name, description) in builtins::list_builtins() {
                println!("{name}\t{description}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Carleson(a) => (Kind::Carleson, a),
        Command::Represent(a) => (Kind::Represent, a),
        Command::Approximate(a) => (Kind::Approximate, a),
        Command::Hypercyclic(a) => (Kind::Hypercyclic, a),
        Command::Diagnostics(a) => (Kind::Diagnostics, a),
    };
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::Config { .. } | Error::Parse(_))) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
