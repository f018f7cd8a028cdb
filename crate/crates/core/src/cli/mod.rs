//! The `winter-nls` command line: subcommands, configuration merging, atomic output and exit
//! codes.
//!
//! Every subcommand resolves its effective configuration from built-in defaults, then the
//! optional `--config` file (flat `key=value` lines or a JSON object), then the flags. The
//! effective configuration and the crate version are echoed at the top of every output.
//!
//! Exit codes: `0` success, `2` configuration error, `3` numerical failure, `4` blow-up halt.

mod commands;
mod config;
mod output;

pub use commands::{
    BifurcationConfig, DispersiveConfig, EvolveConfig, Figure1Config, Initial, SpectrumConfig, StationaryConfig,
};
pub use config::{parse_config_text, Format};
pub use output::{fmt_real, VERSION};

use crate::error::Error;
use crate::stationary::Regime;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::path::PathBuf;

/// Exit code of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code of an invalid configuration or usage error.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code of a numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit code of an evolution halted by the blow-up detector.
pub const EXIT_BLOWUP: i32 = 4;

/// Environment variable capping the worker threads of parameter sweeps.
pub const THREADS_ENV: &str = "WINTER_NLS_THREADS";

/// Failure of a command-line run.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerics(Error),
    #[error("output error: {0}")]
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Domain(_) | Error::ThresholdResonance => CliError::Config(e.to_string()),
            other => CliError::Numerics(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerics(_) | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "winter-nls", version, about = "Schroedinger dynamics on the half-line with a delta-shell interaction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound state of the linear operator.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Stationary states along labelled branches, with slope classification.
    #[command(allow_negative_numbers = true)]
    Stationary(StationaryArgs),
    /// Saddle-node points of the focusing branches.
    #[command(allow_negative_numbers = true)]
    Bifurcation(BifurcationArgs),
    /// Time evolution with conservation and virial diagnostics.
    #[command(allow_negative_numbers = true)]
    Evolve(EvolveArgs),
    /// Decay of the continuous-spectrum part of Gaussian data.
    #[command(name = "dispersive-check", allow_negative_numbers = true)]
    DispersiveCheck(DispersiveArgs),
    /// The (eta, Omega) branch diagram for the focusing problem.
    #[command(allow_negative_numbers = true)]
    Figure1(Figure1Args),
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Configuration file: flat key=value lines or a JSON object.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Output file (written atomically); standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct StationaryArgs {
    #[arg(long, value_parser = parse_regime)]
    regime: Option<Regime>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta_min: Option<f64>,
    #[arg(long)]
    eta_step: Option<f64>,
    #[arg(long)]
    n_linear: Option<usize>,
    #[arg(long)]
    n_log: Option<usize>,
    #[arg(long)]
    pc_min: Option<f64>,
    #[arg(long)]
    slope_tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse::<Regime>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Serialize)]
struct BifurcationArgs {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of points to report.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    lambda_prime_min: Option<f64>,
    #[arg(long)]
    lambda_prime_max: Option<f64>,
    #[arg(long)]
    n_p: Option<usize>,
    #[arg(long)]
    n_lambda_prime: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct EvolveArgs {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Length of the truncated domain.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    observer_stride: Option<usize>,
    #[arg(long)]
    renormalize: Option<bool>,
    #[arg(long)]
    adaptive: Option<bool>,
    #[arg(long)]
    growth_limit: Option<f64>,
    #[arg(long)]
    dt_min: Option<f64>,
    #[arg(long)]
    h1_max: Option<f64>,
    #[arg(long)]
    resolution_fraction: Option<f64>,
    #[arg(long, value_enum)]
    initial: Option<commands::Initial>,
    #[arg(long)]
    center: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    classify: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct DispersiveArgs {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Comma-separated observation times.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long)]
    center: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    allow_threshold: Option<bool>,
    #[arg(long)]
    ia_z_min: Option<f64>,
    #[arg(long)]
    ia_z_max: Option<f64>,
    #[arg(long)]
    ia_nz: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    ia_times: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct Figure1Args {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta_min: Option<f64>,
    #[arg(long)]
    eta_step: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

/// Thread pool honouring the `WINTER_NLS_THREADS` cap (machine cores when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))
}

fn dispatch(command: Command) -> Result<commands::Outcome, CliError> {
    use config::resolve;
    match command {
        Command::Spectrum(a) => commands::spectrum(&resolve(a.common.config.as_deref(), &a)?),
        Command::Stationary(a) => commands::stationary(&resolve(a.common.config.as_deref(), &a)?),
        Command::Bifurcation(a) => commands::bifurcation(&resolve(a.common.config.as_deref(), &a)?),
        Command::Evolve(a) => commands::evolve_cmd(&resolve(a.common.config.as_deref(), &a)?),
        Command::DispersiveCheck(a) => commands::dispersive(&resolve(a.common.config.as_deref(), &a)?),
        Command::Figure1(a) => commands::figure1(&resolve(a.common.config.as_deref(), &a)?),
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let run = || -> Result<bool, CliError> {
        let pool = thread_pool()?;
        let outcome = pool.install(|| dispatch(cli.command))?;
        output::write_output(outcome.output.as_deref(), &outcome.body)?;
        Ok(outcome.blowup_halt)
    };
    match run() {
        Ok(false) => EXIT_OK,
        Ok(true) => {
            eprintln!("winter-nls: evolution halted by the blow-up detector");
            EXIT_BLOWUP
        }
        Err(e) => {
            eprintln!("winter-nls: {e}");
            e.exit_code()
        }
    }
}
