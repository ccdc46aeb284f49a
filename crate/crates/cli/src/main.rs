mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oran_jopt::baseline::BudgetSplit;
use oran_jopt::experiment::{Figure, Mode, Scale};

/// Energy-minimizing RB allocation and DU selection for O-RAN.
#[derive(Parser, Debug)]
#[command(name = "oran-jopt", version, about)]
struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random scenario file.
    Generate {
        /// Generator settings (TOML or JSON); defaults apply to missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scenario file.
    Solve {
        scenario: PathBuf,
        #[arg(long, default_value = "joint")]
        mode: Mode,
        #[command(flatten)]
        solver: SolverFlags,
        /// Directory for result.csv, allocation.json and allocation.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a preset sweep and write its CSV table and SVG chart.
    Experiment {
        preset: Figure,
        #[arg(long, default_value = "desk")]
        scale: Scale,
        /// Comma-separated seeds, replacing the preset's.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[command(flatten)]
        solver: SolverFlags,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Write the model of a scenario in free MPS format. The disjoint mode
    /// writes its first (RB allocation) stage.
    ExportMps {
        scenario: PathBuf,
        #[arg(long, default_value = "joint")]
        mode: Mode,
        #[arg(long)]
        split: Option<BudgetSplit>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an allocation file against a scenario, or find the optimum of a
    /// tiny scenario by enumeration.
    Verify {
        scenario: PathBuf,
        /// Allocation JSON as written by `solve`.
        #[arg(long)]
        allocation: Option<PathBuf>,
        /// Enumerate all allocations (tiny scenarios only).
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct SolverFlags {
    /// Relative optimality gap at which to stop.
    #[arg(long)]
    gap: Option<f64>,
    /// Wall-clock limit per solve in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Branch-and-bound node limit per solve.
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Budget split of the disjoint baseline: worst-case or fraction:<a>,
    /// optionally with +residual.
    #[arg(long)]
    split: Option<BudgetSplit>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Generate { config, seed, out } => commands::generate(config.as_deref(), seed, &out),
        Command::Solve {
            scenario,
            mode,
            solver,
            out,
        } => commands::solve(&scenario, mode, &solver, out.as_deref()),
        Command::Experiment {
            preset,
            scale,
            seeds,
            solver,
            workers,
            out,
        } => commands::experiment(preset, scale, seeds, &solver, workers, &out),
        Command::ExportMps {
            scenario,
            mode,
            split,
            out,
        } => commands::export_mps(&scenario, mode, split, &out),
        Command::Verify {
            scenario,
            allocation,
            oracle,
        } => commands::verify(&scenario, allocation.as_deref(), oracle),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code as u8)
        }
    }
}
