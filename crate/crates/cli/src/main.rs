use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use pueb_cli::commands::{mub_gen, parse_shots, tomo, SchemeArg, Shots, StateSource, TomoArgs};
use pueb_cli::dims::parse_dim;
use pueb_cli::report::RunReport;
use pueb_cli::verify::{run_verify, Suite};

/// Mutually unbiased bases, entangled bases, operator counting and tomography round trips
/// for odd prime and prime-power dimensions.
#[derive(Parser)]
#[command(name = "pueb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the d + 1 mutually unbiased bases and a manifest.
    MubGen {
        /// "p" or "p^n"
        #[arg(long)]
        dim: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        dim: String,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        json: bool,
    },
    /// Simulate measurements on a state and reconstruct it.
    Tomo {
        #[arg(long)]
        dim: String,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Seed for the random state and for sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Read the true state from a density-matrix file instead of drawing one.
        #[arg(long)]
        state_file: Option<PathBuf>,
        /// "exact" or a number of shots per setting.
        #[arg(long, default_value = "exact", value_parser = parse_shots)]
        shots: Shots,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn run(command: Command) -> Result<(RunReport, bool)> {
    Ok(match command {
        Command::MubGen { dim, out, json } => (mub_gen(parse_dim(&dim)?, &out)?, json),
        Command::Verify { dim, suite, json } => (run_verify(parse_dim(&dim)?, suite)?, json),
        Command::Tomo { dim, scheme, seed, state_file, shots, out, json } => {
            let state = state_file.map_or(StateSource::Random, StateSource::File);
            (tomo(&TomoArgs { dim: parse_dim(&dim)?, scheme, state, seed, shots, out })?, json)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli.command) {
        Ok((mut report, json)) => {
            report.wall_time_ms = start.elapsed().as_millis() as u64;
            print!("{}", if json { report.to_json() } else { report.to_table() });
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
