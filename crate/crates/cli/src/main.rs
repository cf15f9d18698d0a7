//! Batch experiment driver: reads a JSON experiment config, runs one
//! experiment family, and writes CSV/JSON data files.

mod commands;
mod gnuplot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "vqa-noise", version, about = "Stochastic gate-noise experiments for VQE and QAOA circuits")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize every instance; writes parameters, energies, overlap bounds and noise thresholds.
    Optimize(Common),
    /// Mean energy shift versus noise spread, averaged over instances.
    SigmaSweep(Common),
    /// Energy with one parameter shifted at a time.
    ParamSweep(Common),
    /// Constrained QAOA optimum over depth and execution-time budget.
    TimeScan(Common),
}

#[derive(Args, Clone)]
pub struct Common {
    /// Experiment configuration (JSON, "schema": 1).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configuration seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the Monte Carlo sample count per noise level.
    #[arg(long)]
    samples: Option<usize>,
    /// Largest register for exact density-matrix evaluation.
    #[arg(long, default_value_t = vqa_noise::DEFAULT_MAX_DM_QUBITS)]
    max_dm_qubits: usize,
    /// Also write a gnuplot script next to the data.
    #[arg(long)]
    gnuplot_script: bool,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    match cli.command {
        Command::Optimize(c) => commands::optimize(&c),
        Command::SigmaSweep(c) => commands::sigma_sweep(&c),
        Command::ParamSweep(c) => commands::param_sweep(&c),
        Command::TimeScan(c) => commands::time_scan(&c),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
