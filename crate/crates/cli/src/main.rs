//! `qutrit-qrg`: SL(3,C)^3 invariants and the spin-1 block RG from the shell.
//!
//! Exit codes: 0 success, 1 invalid arguments or I/O, 2 malformed tensor JSON
//! or config, 3 zero tensor, 4 singular block.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "qutrit-qrg", version, about)]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Shared {
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation [default: all cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Flat TOML file with the same keys as the long flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomly generated tensors and SL(3) operators [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// I6, I9, I12, J12 and the hyperdeterminant of a tensor JSON file
    Invariants(commands::InvariantsArgs),
    /// Block solution at one (delta, D)
    Block(commands::BlockArgs),
    /// RG trajectory as JSON lines
    Flow(commands::FlowArgs),
    /// |I6| sweep over delta at fixed D: CSV, boundaries JSON, gnuplot script
    Scan(commands::ScanArgs),
    /// Phase boundaries at fixed D as JSON
    Phase(commands::PhaseArgs),
}

/// Settings shared by every subcommand after merging flags and config.
pub struct Context {
    pub config: Config,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

fn run(cli: Cli) -> CliResult<()> {
    let config = Config::load(cli.shared.config.as_deref())?;
    let jobs = config.pick(cli.shared.jobs, "jobs", 0usize)?;
    if cli.shared.jobs == Some(0) {
        return Err(CliError::invalid("--jobs must be at least 1"));
    }
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::invalid(format!("thread pool: {e}")))?;
    }
    let ctx = Context {
        out: cli.shared.out.or(config.get("out")?),
        seed: config.pick(cli.shared.seed, "seed", 0)?,
        config,
    };
    match cli.command {
        Command::Invariants(a) => commands::invariants(&ctx, a),
        Command::Block(a) => commands::block(&ctx, a),
        Command::Flow(a) => commands::flow(&ctx, a),
        Command::Scan(a) => commands::scan(&ctx, a),
        Command::Phase(a) => commands::phase(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
