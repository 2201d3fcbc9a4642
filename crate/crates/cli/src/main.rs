use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "pairguess", version, about = "Pair-identification game: evaluate, optimize, simulate, certify")]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true, env = "PAIRGUESS_THREADS")]
    threads: Option<usize>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinStrategy {
    Trine,
    Tetrad,
    Polygon,
    ClassicalOptimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classical,
    Quantum,
    Delta,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// Number of values of X.
    #[arg(long)]
    d: usize,

    /// Built-in strategy.
    #[arg(long, value_enum, conflicts_with = "ensemble_file", required_unless_present = "ensemble_file")]
    strategy: Option<BuiltinStrategy>,

    /// File with one state per line: Re(amp0) Im(amp0) Re(amp1) Im(amp1).
    #[arg(long)]
    ensemble_file: Option<PathBuf>,

    /// Depolarizing noise on the qubit, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    noise: f64,

    /// Message levels for classical-optimum.
    #[arg(long, default_value_t = 2)]
    levels: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact success matrix and averages of a strategy.
    Evaluate {
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Search for optimal strategies or maximize the distinguishability bound.
    Optimize {
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.005)]
        grid_step: f64,
    },
    /// Write seeded round records, one JSON object per line.
    Simulate {
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "out")]
        out: PathBuf,
    },
    /// Certify quantumness and coherence from a round-record file.
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(commands::EXIT_ERROR);
        }
    }
    let result = match cli.command {
        Command::Evaluate { strategy } => commands::evaluate(&strategy, cli.format),
        Command::Optimize {
            d,
            mode,
            levels,
            restarts,
            seed,
            grid_step,
        } => commands::optimize(d, mode, levels, restarts, seed, grid_step, cli.format),
        Command::Simulate {
            strategy,
            rounds,
            seed,
            out,
        } => commands::simulate(&strategy, rounds, seed, &out, cli.format),
        Command::Certify { input, d, alpha } => commands::certify(&input, d, alpha, cli.format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
