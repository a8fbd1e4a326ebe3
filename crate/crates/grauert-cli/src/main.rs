//! Batch front door: configuration, reproducible runs, and machine-readable
//! outputs for the verification suites.
//!
//! Configuration comes from a plain-text `key = value` file plus flag
//! overrides; every resolved parameter is echoed into the outputs and
//! identical configurations produce byte-identical output files.  The exit
//! code is 0 iff all asserted suites pass; otherwise a machine-readable
//! failure manifest is written next to the outputs.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

mod config;
mod output;
mod runs;

use config::{KernelChoice, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "grauert",
    version,
    about = "Grauert tube kernel verification suites"
)]
struct Cli {
    /// Plain-text `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (overrides the THREADS environment variable).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default, Clone)]
struct Overrides {
    /// Model family: circle | torus.
    #[arg(long)]
    model: Option<String>,
    /// Torus dimension m.
    #[arg(long)]
    dim: Option<usize>,
    /// Tube radius τ.
    #[arg(long)]
    tau: Option<f64>,
    /// Fourier support half-width ε of the smoothing function.
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated λ grid, e.g. "50,71,100,141,200,283,400".
    #[arg(long, value_name = "LIST")]
    lambda_grid: Option<String>,
    /// Comparison window radius ρ.
    #[arg(long)]
    rho: Option<f64>,
    /// Kernel selection: smoothed | toeplitz | both.
    #[arg(long)]
    kernel: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Echoed into outputs (all computations are deterministic).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate lattice modes with Toeplitz eigenvalues and Hardy norms.
    Spectrum {
        #[command(flatten)]
        overrides: Overrides,
        /// Largest |k| to tabulate.
        #[arg(long, default_value_t = 25.0)]
        cutoff: f64,
    },
    /// Emit the reduced stationary-phase critical data as JSON.
    PhaseReport {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the full per-λ scaling study and write JSON, CSV and plot data.
    ScalingStudy {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Build Heisenberg charts and verify their normal-form contract.
    ChartCheck {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Export kernel values on the rescaled comparison grid as CSV.
    KernelEval {
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug, Serialize)]
struct FailureManifest {
    failures: Vec<Failure>,
}

#[derive(Debug, Serialize)]
struct Failure {
    suite: String,
    message: String,
}

fn main() {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(failures) if failures.is_empty() => std::process::exit(0),
        Ok(_) => std::process::exit(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<Vec<Failure>> {
    let overrides = match &cli.command {
        Command::Spectrum { overrides, .. }
        | Command::PhaseReport { overrides }
        | Command::ScalingStudy { overrides }
        | Command::ChartCheck { overrides }
        | Command::KernelEval { overrides } => overrides.clone(),
    };
    let config = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    output::write_json(&config.out.join("config_echo.json"), &config)?;

    let failures = match cli.command {
        Command::Spectrum { cutoff, .. } => runs::spectrum(&config, cutoff)?,
        Command::PhaseReport { .. } => runs::phase_report(&config)?,
        Command::ScalingStudy { .. } => runs::scaling_study(&config)?,
        Command::ChartCheck { .. } => runs::chart_check(&config)?,
        Command::KernelEval { .. } => runs::kernel_eval(&config)?,
    };
    if !failures.is_empty() {
        let manifest = FailureManifest {
            failures: failures
                .iter()
                .map(|(suite, message)| Failure {
                    suite: suite.clone(),
                    message: message.clone(),
                })
                .collect(),
        };
        output::write_json(&config.out.join("failure_manifest.json"), &manifest)?;
        for (suite, message) in &failures {
            eprintln!("suite failed: {suite}: {message}");
        }
        return Ok(manifest.failures);
    }
    Ok(Vec::new())
}

/// Resolve a kernel-choice string.
pub(crate) fn parse_kernel(s: &str) -> Result<KernelChoice> {
    match s {
        "smoothed" => Ok(KernelChoice::Smoothed),
        "toeplitz" => Ok(KernelChoice::Toeplitz),
        "both" => Ok(KernelChoice::Both),
        other => bail!("unknown kernel selection '{other}' (smoothed | toeplitz | both)"),
    }
}

pub(crate) fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected 'key = value'", path.display(), idx + 1);
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}
