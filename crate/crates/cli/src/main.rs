//! `maxsinr`: validation runs, figure data series and scan plans.

mod config;
mod figures;
mod manifest;
mod plan;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use maxsinr_core::scan::ScanMode;

use config::{Config, ConfigError};

#[derive(Debug, Parser)]
#[command(name = "maxsinr", version, about = "Best-SINR models and scan planning for dense small-cell networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Clone, clap::Args)]
struct Options {
    /// Flat TOML configuration; defaults to the reference deployment.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo replications.
    #[arg(long, global = true)]
    reps: Option<u64>,
    #[arg(long, global = true, value_enum)]
    figure: Option<Figure>,
    /// Mean residence time in a cell (s).
    #[arg(long = "T", global = true)]
    residence: Option<f64>,
    /// Scan time per cell (s).
    #[arg(long = "s", global = true)]
    scan: Option<f64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Minimum growth factor excess for the constrained plan.
    #[arg(long = "delta-g", global = true)]
    delta_g: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the invariant suite and print a JSON report.
    Validate,
    /// Write the CSV data series of one figure.
    Fig,
    /// Print the recommended scan plan as JSON.
    Plan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Figure {
    MdaCdf,
    MdaJsdiv,
    JointDensity,
    IndepJsdiv,
    ScanCurves,
}

impl Figure {
    pub fn id(self) -> &'static str {
        match self {
            Self::MdaCdf => "mda_cdf",
            Self::MdaJsdiv => "mda_jsdiv",
            Self::JointDensity => "joint_density",
            Self::IndepJsdiv => "indep_jsdiv",
            Self::ScanCurves => "scan_curves",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Compressed,
    Parallel,
}

fn effective_config(opts: &Options, randomized: bool) -> anyhow::Result<Config> {
    let mut cfg = Config::load(opts.config.as_deref())?;
    if let Some(v) = opts.seed {
        cfg.seed = Some(v);
    }
    if let Some(v) = opts.reps {
        cfg.reps = v;
    }
    if let Some(v) = opts.residence {
        cfg.residence_time_s = v;
    }
    if let Some(v) = opts.scan {
        cfg.per_cell_scan_s = v;
    }
    if let Some(m) = opts.mode {
        cfg.mode = match m {
            Mode::Compressed => ScanMode::Compressed,
            Mode::Parallel => ScanMode::Parallel,
        };
    }
    if let Some(v) = opts.delta_g {
        cfg.delta_g = Some(v);
    }
    cfg.check().map_err(|e| ConfigError(e.to_string()))?;
    if randomized && cfg.seed.is_none() {
        let seed = rand::random::<u64>();
        eprintln!("seed = {seed}");
        cfg.seed = Some(seed);
    }
    Ok(cfg)
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("MAXSINR_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("MAXSINR_THREADS = {v:?} is not a positive integer"))?;
        if n == 0 {
            anyhow::bail!("MAXSINR_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        info!("worker threads capped at {n}");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    configure_threads()?;
    let opts = &cli.opts;
    match cli.command {
        Command::Validate => {
            let cfg = effective_config(opts, true)?;
            validate::run(&cfg, opts.out.as_deref())
        }
        Command::Fig => {
            let figure = opts.figure.ok_or_else(|| ConfigError("fig needs --figure".into()))?;
            let cfg = effective_config(opts, figure != Figure::MdaJsdiv)?;
            let out = opts.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            figures::run(figure, &cfg, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan => {
            let cfg = effective_config(opts, false)?;
            plan::run(&cfg, opts.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
