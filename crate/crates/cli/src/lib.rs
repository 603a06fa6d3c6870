//! Command-line driver for `frontspeed`: binds TOML run configurations to
//! the eigenvalue, dispersion, speed and simulation layers and writes
//! reports and CSVs.
//!
//! Exit codes: 0 when every check passes, 1 on a scientific failure
//! (a check fails or a computation errors), 2 on usage or parse errors.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Outcome;
pub use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed config, missing blocks.
    Usage(String),
    /// A numerical computation failed.
    Compute(frontspeed::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(msg) => write!(f, "usage error: {msg}"),
            Self::Compute(e) => write!(f, "error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<frontspeed::Error> for CliError {
    fn from(e: frontspeed::Error) -> Self {
        Self::Compute(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "frontspeed",
    version,
    about = "Minimal KPP front speeds in periodic flows"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed (overrides `seed` in the config)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true, env = "FRONTSPEED_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the flow field and classify the reaction term
    Validate,
    /// Sample μ(λ) and audit convexity
    Dispersion,
    /// Minimal speed c*, regularized speeds and decay rates
    Speed,
    /// Direct simulation with front tracking
    Simulate,
    /// Compare simulated and variational speeds
    Compare,
}

/// Parses, runs and reports; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // A second initialization (e.g. repeated in-process runs) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    } else if let Some(out) = &config.out {
        config.out = Some(config.base_dir.join(out));
    }
    let outcome = commands::dispatch(cli.command, &config)?;
    output::write_atomic(
        &output::out_dir(&config).join(format!("{}.txt", outcome.name)),
        outcome.lines.join("\n").as_bytes(),
    )?;
    Ok(outcome)
}
