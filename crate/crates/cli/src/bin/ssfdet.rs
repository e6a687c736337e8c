use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use ssfdet_cli::{presets, run_suite, Format, RunOptions, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "ssfdet", version, about = "Section determinants versus spectral shift interaction integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the first instance of every batch (the golden case by default).
    Check(Common),
    /// Run every instance of every batch.
    Suite(Common),
    /// Truncation and filtering convergence study.
    Converge(Common),
    /// Subspace perturbation bound.
    Subspace(Common),
    /// The two-level pair where the identity fails.
    Counterexample(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON suite configuration; replaces the built-in preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// Append a wall-clock column. Makes output nondeterministic.
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} row(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<usize> {
    let (common, preset, first_only): (Common, fn() -> SuiteConfig, bool) = match cli.command {
        Command::Check(c) => (c, presets::golden, true),
        Command::Suite(c) => (c, presets::full, false),
        Command::Converge(c) => (c, presets::converge, false),
        Command::Subspace(c) => (c, presets::subspace, false),
        Command::Counterexample(c) => (c, presets::counterexample, false),
    };
    if !(common.tol_scale.is_finite() && common.tol_scale > 0.0) {
        anyhow::bail!("--tol-scale must be positive and finite");
    }
    let config = match &common.config {
        Some(path) => SuiteConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => preset(),
    };
    let opts = RunOptions { tol_scale: common.tol_scale, timings: common.timings, first_only, seed: common.seed };
    let outcome = run_suite(&config, &opts);

    let sink: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    outcome.report.write(common.format, BufWriter::new(sink)).context("writing report")?;
    Ok(outcome.failures)
}
