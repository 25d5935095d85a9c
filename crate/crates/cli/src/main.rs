//! `qres`: batch front end for resource-impact computations.
//!
//! Subcommands: sweep-theta, dynamics, bounds, decompose, hypothesis,
//! verify, check-config. Exit codes: 0 success, 2 config error,
//! 3 invariant failure, 4 regime/precondition mismatch.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Invariant(String),
    Regime(String),
    Other(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant failure: {m}"),
            CliError::Regime(m) => write!(f, "regime mismatch: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Regime(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "qres", about = "Resource impact functionals, rates, and bounds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/SVG artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the seed from the [run] section.
    #[arg(long)]
    seed: Option<u64>,
    /// Also emit SVG line plots next to each CSV.
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity of the one-step dimer channel across the mixing angles.
    SweepTheta(CommonArgs),
    /// Capacity, rate, and bound-chain time series.
    Dynamics(CommonArgs),
    /// Time/feasibility bound report with verdicts.
    Bounds(CommonArgs),
    /// Free/resourceful decomposition and compatibility report.
    Decompose(CommonArgs),
    /// Multi-shot hypothesis-testing table.
    Hypothesis(CommonArgs),
    /// Run the randomized invariant suites.
    Verify {
        /// Path to the TOML run configuration (only [run] seed/samples used).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Instances per suite.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Parse and validate a configuration, reporting its interpretation.
    CheckConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("QRES_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        } else {
            eprintln!("warning: ignoring unparsable QRES_THREADS = {v:?}");
        }
    }
}

fn prepare(args: &CommonArgs) -> Result<config::Prepared, CliError> {
    let cfg = config::parse(&args.config)?;
    let prepared = cfg.prepare(args.seed)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Other(format!("cannot create {}: {e}", args.out.display())))?;
    Ok(prepared)
}

fn run() -> Result<(), CliError> {
    init_thread_pool();
    let cli = Cli::parse();
    match cli.command {
        Command::SweepTheta(args) => {
            let p = prepare(&args)?;
            commands::sweep_theta(&p, &args.out, args.plots)
        }
        Command::Dynamics(args) => {
            let p = prepare(&args)?;
            commands::dynamics(&p, &args.out, args.plots)
        }
        Command::Bounds(args) => {
            let p = prepare(&args)?;
            commands::bounds(&p, &args.out, args.plots)
        }
        Command::Decompose(args) => {
            let p = prepare(&args)?;
            commands::decompose(&p, &args.out, args.plots)
        }
        Command::Hypothesis(args) => {
            let p = prepare(&args)?;
            commands::hypothesis(&p, &args.out, args.plots)
        }
        Command::Verify {
            config: cfg_path,
            seed,
            samples,
        } => {
            let (mut run_seed, mut run_samples) = (7u64, 200usize);
            if let Some(path) = cfg_path {
                let cfg = config::parse(&path)?;
                run_seed = cfg.run.seed;
                run_samples = cfg.run.samples;
            }
            if let Some(s) = seed {
                run_seed = s;
            }
            if let Some(n) = samples {
                run_samples = n;
            }
            commands::verify(run_seed, run_samples)
        }
        Command::CheckConfig { config: path } => {
            let cfg = config::parse(&path)?;
            let prepared = cfg.prepare(None)?;
            println!("config ok: dimension {}", prepared.dim);
            println!(
                "model    = {}",
                if prepared.dimer.is_some() { "dimer" } else { "custom generator" }
            );
            println!("map      = {:?}", prepared.map.kind);
            println!(
                "window   = [{}, {}] with {} grid points, seed {}",
                prepared.run.t_start, prepared.run.t_end, prepared.run.grid_points, prepared.run.seed
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
