//! `dandelion`: calibration, loss distributions, risk metrics, correlation
//! scans, and sampling for the star-graph Ising credit model.
//!
//! Exit codes: 0 success, 2 argument or domain error, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dandelion::ModelError;

mod commands;
mod manifest;
mod output;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] ModelError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::Domain(_) | Self::Usage(_) => 2,
            Self::Io { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dandelion",
    version,
    about = "Star-graph Ising credit-risk model"
)]
struct Cli {
    /// Directory for output files when --output is not given (otherwise stdout).
    #[arg(long, global = true, env = "DANDELION_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Default probability shared by every credit, in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
    /// Correlation between the central and each non-central default indicator.
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    /// Number of non-central credits N.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form natural parameters, q, and the admissible correlation interval.
    Calibrate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Loss pmf P(L = l), l = 0..N. The loss counts non-central defaults only;
    /// the central credit is not part of L.
    Pmf {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// VaR, mode, mode probability, moments, and peaks of one loss distribution.
    Metrics {
        #[command(flatten)]
        model: ModelArgs,
        /// VaR confidence level in (0, 1).
        #[arg(long, default_value_t = 0.99)]
        level: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Risk metrics over an evenly spaced correlation grid with mode-jump detection.
    Scan {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        n: usize,
        /// Grid points (at least 3).
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Distance kept from each open end of the admissible interval.
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
        #[arg(long, default_value_t = 0.99)]
        level: f64,
        /// Adjacent mode change that counts as a jump (exclusive).
        #[arg(long, default_value_t = dandelion::metrics::DEFAULT_JUMP_THRESHOLD)]
        jump_threshold: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact draws of (L0, L) from the model.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let dir = cli.output_dir;
    match cli.command {
        Command::Calibrate {
            model,
            format,
            output,
        } => commands::calibrate(&model, format, output, dir),
        Command::Pmf {
            model,
            format,
            output,
        } => commands::pmf(&model, format, output, dir),
        Command::Metrics {
            model,
            level,
            format,
            output,
        } => commands::metrics(&model, level, format, output, dir),
        Command::Scan {
            p,
            n,
            points,
            margin,
            level,
            jump_threshold,
            format,
            output,
        } => {
            let opts = dandelion::ScanOptions {
                grid: dandelion::GridSpec {
                    count: points,
                    margin,
                },
                level,
                jump_threshold,
            };
            commands::scan(p, n, &opts, format, output, dir)
        }
        Command::Sample {
            model,
            count,
            seed,
            format,
            output,
        } => commands::sample(&model, count, seed, format, output, dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
