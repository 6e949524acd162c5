//! `froglab` — phase-diagram sweeps, transience certificates, percolation
//! thresholds and lemma checks for the frog model with drift.

use clap::{Parser, Subcommand, ValueEnum};
use froglab_core::brw::{certify_transience, CertifyBudget, Strategy};
use froglab_core::percolation::estimate_pc;
use froglab_core::rng::RngStream;
use froglab_cli::{config, emit, lemma, report, sweep};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "froglab",
    version,
    about = "Simulation and numerical certification for the frog model with drift"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    #[value(name = "projected-1d")]
    Projected1d,
    Lines,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Projected1d => Strategy::Projected1d,
            StrategyArg::Lines => Strategy::Lines,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a phase-diagram sweep over an (alpha, w) grid.
    Sweep {
        /// JSON sweep configuration.
        #[arg(long)]
        config: PathBuf,
        /// Root seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Worker threads (falls back to FROGLAB_WORKERS, then to one
        /// thread).
        #[arg(long)]
        workers: Option<usize>,
        /// Validate the configuration, print its canonical form, and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Run a single transience certificate.
    Certify {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        w: f64,
        #[arg(long, value_enum, default_value = "projected-1d")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        xi_trials: u64,
        #[arg(long, default_value_t = 1_000)]
        line_trials: u64,
        #[arg(long, default_value_t = 10_000)]
        decay_trials: u64,
        /// Write the certificate JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the site-percolation critical point from spanning curves.
    PcEstimate {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 400)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the empirical lemma-check battery.
    LemmaChecks {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial multiplier for every check.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(Vec<String>),
    Runtime(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io: {e}"))
    }
}

impl From<froglab_core::Error> for CliError {
    fn from(e: froglab_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(errors)) => {
            eprintln!("configuration rejected:");
            for e in errors {
                eprintln!("  - {e}");
            }
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn workers_from(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("FROGLAB_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn write_or_print<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    bytes.push(b'\n');
    match out {
        Some(path) => emit::write_atomic(path, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep {
            config,
            seed,
            out,
            format,
            workers,
            dry_run,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", config.display())))?;
            let raw: config::RawSweepConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(vec![format!("invalid JSON: {e}")]))?;
            let cfg = config::validate_config(raw, seed).map_err(CliError::Config)?;
            if dry_run {
                println!("{}", serde_json::to_string_pretty(&cfg).unwrap());
                return Ok(());
            }
            let points = sweep::run_sweep(&cfg, &out, workers_from(workers))?;
            match format {
                Format::Csv => emit::write_csv(&points, &out.join("results.csv"))?,
                Format::Json => emit::write_json(
                    &emit::SweepOutput::new(cfg.clone(), points.clone()),
                    &out.join("results.json"),
                )?,
            }
            match report::boundary_monotonicity_report(&points) {
                Ok(rep) => {
                    emit::write_report(&rep, &out.join("report.json"))?;
                    println!(
                        "sweep complete: {} points, boundary nonincreasing: {}, conflicts: {}",
                        points.len(),
                        rep.nonincreasing_in_alpha,
                        rep.conflicts_excluded
                    );
                }
                Err(why) => println!("sweep complete: {} points ({why})", points.len()),
            }
            Ok(())
        }
        Command::Certify {
            d,
            alpha,
            w,
            strategy,
            seed,
            xi_trials,
            line_trials,
            decay_trials,
            out,
        } => {
            let budget = CertifyBudget {
                xi_trials,
                line_trials,
                decay_trials,
                ..CertifyBudget::default()
            };
            let cert = certify_transience(
                d,
                w,
                alpha,
                strategy.into(),
                &budget,
                &RngStream::from_root(seed),
            )?;
            write_or_print(&cert.record(), out.as_ref())
        }
        Command::PcEstimate {
            d,
            sizes,
            trials,
            seed,
            out,
        } => {
            let estimate = estimate_pc(d, &sizes, trials, &RngStream::from_root(seed))?;
            #[derive(Serialize)]
            struct PcOutput {
                d: usize,
                sizes: Vec<usize>,
                trials: u64,
                estimate: f64,
                bracket: (f64, f64),
                flagged: bool,
                seed: u64,
            }
            write_or_print(
                &PcOutput {
                    d,
                    sizes,
                    trials,
                    estimate: estimate.estimate,
                    bracket: estimate.bracket,
                    flagged: estimate.flagged,
                    seed,
                },
                out.as_ref(),
            )
        }
        Command::LemmaChecks { seed, scale, out } => {
            let report = lemma::run_lemma_checks(seed, scale);
            print!("{}", lemma::summarize(&report));
            if out.is_some() {
                write_or_print(&report, out.as_ref())?;
            }
            Ok(())
        }
    }
}
