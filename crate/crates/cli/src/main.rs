use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tf_superres::commands;
use tf_superres::config::{parse_domain, RunConfig};
use tf_superres::error::{CliError, Result};
use tf_superres::pipeline::configure_threads;

/// Simulate and analyze quantum-limited time-frequency separation
/// estimation with mode-selective photon measurement.
#[derive(Parser)]
#[command(name = "tf-superres", version, about)]
struct Cli {
    /// Key-value configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV/JSON/SVG files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the configured domain (freq|time).
    #[arg(long, global = true)]
    domain: Option<String>,

    /// Override the configured worker thread count (0 = default).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the standard, quantum and model variance bounds.
    Bounds,
    /// Raw ratio-estimator curves for both domains.
    Fig2,
    /// Calibrated Monte Carlo variance sweep against the bounds.
    Fig3,
    /// Fit a tomography model from a calibration CSV.
    Calibrate {
        /// CSV with columns: separation (units of sigma), f0, f1, f2.
        data: PathBuf,
    },
    /// Maximum-likelihood separation estimate from one count record.
    Estimate {
        /// Tomography model JSON produced by `calibrate`.
        model: PathBuf,
        n0: u64,
        n1: u64,
        n2: u64,
    },
    /// Run the configured experiment and emit summary statistics.
    Simulate,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(domain) = &cli.domain {
        cfg.domain = parse_domain(domain).map_err(CliError::Config)?;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    configure_threads(cfg.threads);
    let written = match &cli.command {
        Command::Bounds => commands::run_bounds(&cfg, &cli.out)?,
        Command::Fig2 => commands::run_fig2(&cfg, &cli.out)?,
        Command::Fig3 => commands::run_fig3(&cfg, &cli.out)?,
        Command::Calibrate { data } => vec![commands::run_calibrate(&cfg, data, &cli.out)?],
        Command::Estimate { model, n0, n1, n2 } => {
            commands::run_estimate(&cfg, model, [*n0, *n1, *n2])?;
            Vec::new()
        }
        Command::Simulate => commands::run_simulate(&cfg, &cli.out)?,
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
