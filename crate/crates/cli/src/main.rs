//! `agglomg`: coarsening runs, sweeps, solves and exports from the shell.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;
use config::{RunArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "agglomg", version, about = "Element agglomeration coarsening and unstructured multigrid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a hierarchy and print per-level statistics.
    Coarsen(RunArgs),
    /// Build hierarchies for every algorithm and size, write a CSV table.
    Sweep(RunArgs),
    /// Solve a model problem with FGMRES and a V-cycle preconditioner.
    Solve(RunArgs),
    /// Write per-level agglomerates as a VTK file.
    Export(RunArgs),
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Coarsen(a) => commands::coarsen(&RunConfig::resolve(a, false)?),
        Command::Sweep(a) => commands::sweep(&RunConfig::resolve(a, true)?),
        Command::Solve(a) => commands::solve(&RunConfig::resolve(a, false)?),
        Command::Export(a) => commands::export(&RunConfig::resolve(a, false)?),
    }
}

/// The error chain joined with `: `, skipping causes already quoted by the
/// message above them.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !out.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("error: solver did not converge");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(1)
        }
    }
}
