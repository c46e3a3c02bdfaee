//! Command-line experiment runner.
//!
//! ```text
//! hybrid-radar <design|contour|k-sweep|robustness|detect|convergence>
//!     [--config FILE] [--out DIR] [--seed N]
//! ```
//!
//! Every run writes `metadata.txt` (sorted `key=value` lines) plus the CSV
//! tables of its experiment. Exit codes: 0 success, 1 I/O failure,
//! 2 invalid configuration, 3 numerical failure.

pub mod config;
pub mod experiments;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

pub use config::{Config, ExperimentKind, Mode};
pub use experiments::{run_design, DesignRecord, RunOutput};
pub use output::{emit_convergence_trace, read_convergence_trace, read_metadata};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hybrid-radar", version, about = "Hybrid active-passive radar waveform and filter design experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// TOML configuration; defaults apply to every missing field.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One design at the configured scenario.
    Design(RunArgs),
    /// Output SINR over a grid of channel SNRs for all four configurations.
    Contour(RunArgs),
    /// Output SINR versus the uncertainty bound K.
    KSweep(RunArgs),
    /// SINR of fixed designs versus the true delay k.
    Robustness(RunArgs),
    /// Probability of missing versus average SNR.
    Detect(RunArgs),
    /// Objective traces of the max-min and weighted-sum designs.
    Convergence(RunArgs),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &RunArgs) {
        match self {
            Command::Design(a) => (ExperimentKind::Design, a),
            Command::Contour(a) => (ExperimentKind::Contour, a),
            Command::KSweep(a) => (ExperimentKind::KSweep, a),
            Command::Robustness(a) => (ExperimentKind::Robustness, a),
            Command::Detect(a) => (ExperimentKind::Detect, a),
            Command::Convergence(a) => (ExperimentKind::Convergence, a),
        }
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        Error::NotConverged { .. } | Error::Numerical(_) | Error::DegenerateRounding => EXIT_NUMERICAL,
        Error::Config(_)
        | Error::Domain(_)
        | Error::Dimension(_)
        | Error::ShiftOutOfRange { .. }
        | Error::InsufficientTrials { .. } => EXIT_CONFIG,
    }
}

/// Runs one experiment and writes its tables and `metadata.txt` into `out`.
pub fn run_experiment(kind: ExperimentKind, cfg: &Config, seed_flag: Option<u64>, out: &Path) -> Result<RunOutput> {
    cfg.validate()?;
    if let Some(k) = cfg.experiment.kind {
        if k != kind {
            return Err(Error::Config(format!(
                "field `experiment.kind`: configuration is for `{}` but `{}` was requested",
                k.label(),
                kind.label()
            )));
        }
    }
    let seed = cfg.resolved_seed(seed_flag);
    std::fs::create_dir_all(out)?;
    let mut run = experiments::dispatch(kind, cfg, seed, out)?;

    let mut meta: BTreeMap<String, String> = cfg
        .flatten()
        .into_iter()
        .map(|(k, v)| (format!("config.{k}"), v))
        .collect();
    meta.insert("experiment".into(), kind.label().into());
    meta.insert("seed".into(), seed.to_string());
    meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    meta.append(&mut run.metadata.clone());
    output::write_metadata(&out.join("metadata.txt"), &meta)?;
    run.metadata = meta;
    Ok(run)
}

/// Parses `args` (including the program name), runs the experiment and
/// returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (kind, args) = cli.command.split();
    let cfg = match &args.config {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    };
    let result = cfg.and_then(|cfg| {
        let out = args
            .out
            .clone()
            .or_else(|| cfg.experiment.output.clone())
            .unwrap_or_else(|| PathBuf::from("out").join(kind.label()));
        run_experiment(kind, &cfg, args.seed, &out).map(|_| out)
    });
    match result {
        Ok(out) => {
            eprintln!("wrote {}", out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
