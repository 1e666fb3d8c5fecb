//! `normctl`: generate decay matrices, evaluate norms, sample differential
//! inequalities and certify norm-controlled inverses.
//!
//! Exit codes: 0 success, 2 malformed input or usage, 3 singular or
//! degenerate input, 4 no convergence.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::*;

#[derive(Debug, Parser)]
#[command(name = "normctl", version, about = "Decay-norm experiments and inversion certificates")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated matrix, symbol or sampled function as JSON.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Evaluate a family norm of a matrix file.
    Norm(NormArgs),
    /// Sample the differential inequality over seeded matrix pairs.
    Diffcheck(DiffArgs),
    /// Table of measured `‖Bⁿ‖` against the digit bound.
    Powers(PowersArgs),
    /// Inversion certificate for a matrix file.
    Invert(InvertArgs),
    /// Wiener-algebra norms and inverses of a symbol file.
    #[command(subcommand)]
    Wiener(WienerCommand),
    /// Aggregate inversion certificates into a CSV table.
    Report(ReportArgs),
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let recorder = manifest::Recorder::new(manifest::command_line(&argv));
    let outcome = match cli.command {
        Command::Gen(c) => run_gen(c),
        Command::Norm(a) => run_norm(a, recorder),
        Command::Diffcheck(a) => run_diffcheck(a, recorder),
        Command::Powers(a) => run_powers(a, recorder),
        Command::Invert(a) => run_invert(a, recorder),
        Command::Wiener(c) => run_wiener(c, recorder),
        Command::Report(a) => run_report(a, recorder),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
