//! `rt`: batch runs of the ratchet-core experiments from a JSON config.
//!
//! Exit codes: 0 success, 2 input or numerical error, 3 relaxation did not
//! converge, 4 the potential failed the antisymmetry precondition.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Status;
use crate::config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Module(ratchet_core::Error),
    Antisymmetry(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Module(_) => 2,
            CliError::Antisymmetry(_) => 4,
        }
    }
}

impl From<ratchet_core::Error> for CliError {
    fn from(e: ratchet_core::Error) -> Self {
        CliError::Module(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Antisymmetry(m) => f.write_str(m),
            CliError::Module(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rt",
    version,
    about = "Transport in traveling periodic potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Run `recover` even when the potential is not antisymmetric.
    #[arg(long, global = true)]
    force: bool,

    /// Worker threads; falls back to RT_THREADS, then to the core count.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Steady state at one (sigma, v): steady.json, rho.csv.
    Steady,
    /// Current over a (sigma, v) grid: response.csv.
    Sweep,
    /// Relax toward the steady state: snapshots.csv, evolve.json.
    Evolve,
    /// Follow one particle orbit: orbit.csv, orbit.json.
    Orbit,
    /// Even moments from the resistance curve: recovery.json, resistance.csv.
    Recover,
    /// Transform identity residuals over a grid: residuals.csv.
    IdentityCheck,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("RT_THREADS") {
            Ok(s) => Some(
                s.trim()
                    .parse()
                    .map_err(|_| CliError::input(format!("RT_THREADS is not a count: {s:?}")))?,
            ),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::input("thread count must be positive"));
    }
    Ok(n)
}

fn run(cli: &Cli) -> Result<Status, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::input("--config <path> is required"))?;
    let cfg = RunConfig::load(path)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::input(format!("cannot start thread pool: {e}")))?;
    let result = pool.install(|| match cli.command {
        Command::Steady => commands::steady(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Evolve => commands::evolve(&cfg),
        Command::Orbit => commands::orbit(&cfg),
        Command::Recover => commands::recover(&cfg, cli.force),
        Command::IdentityCheck => commands::identity_check(&cfg),
    })?;
    result.outputs.commit(&cli.out)?;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(result.stdout.as_bytes());
    Ok(result.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => {
            eprintln!("rt: relaxation did not converge within max_steps");
            ExitCode::from(3)
        }
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            eprintln!("rt: {line}");
            ExitCode::from(e.exit_code())
        }
    }
}
