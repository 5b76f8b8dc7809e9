//! `orbitlim` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error (unknown
//! subcommand or flag), 3 malformed configuration, 4 resource budget
//! exceeded.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::Context;
use config::ExperimentConfig;
use output::Artifacts;

#[derive(Parser, Debug)]
#[command(name = "orbitlim", version, about = "Orbit counting and limit measure experiments")]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config and the environment).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Maximum number of orbit elements held during enumeration.
    #[arg(long = "budget-elements", global = true, default_value_t = 20_000_000)]
    budget_elements: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Dump the orbit ball as CSV.
    Enumerate,
    /// Estimate the critical exponent.
    Exponent,
    /// Boundary measure estimate and its Fourier coefficients.
    Ps,
    /// Empirical averages against the limit integral.
    Compare,
    /// Distribution of a/T against its limit.
    Marginal,
    /// Sector sums over (n, m, T).
    Sectors,
    /// Fejér approximation rate fit.
    Fejer,
    /// Annuli partition diagnostics.
    Annuli,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Exponent => "exponent",
            Command::Ps => "ps",
            Command::Compare => "compare",
            Command::Marginal => "marginal",
            Command::Sectors => "sectors",
            Command::Fejer => "fejer",
            Command::Annuli => "annuli",
        }
    }
}

/// Error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<orbitlim::Error> for Failure {
    fn from(e: orbitlim::Error) -> Self {
        let code = match e {
            orbitlim::Error::Budget { .. } => 4,
            orbitlim::Error::Spec(_) => 3,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Failure::config("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::other(e.to_string()))?;
    }
    let dir = cfg.resolve_output_dir(cli.out.as_deref());
    let mut out = Artifacts::create(&dir)?;
    let mut ctx = Context {
        cfg: &cfg,
        budget: cli.budget_elements,
        out: &mut out,
    };
    let result = match cli.command {
        Command::Enumerate => commands::enumerate_cmd(&mut ctx),
        Command::Exponent => commands::exponent_cmd(&mut ctx),
        Command::Ps => commands::ps_cmd(&mut ctx),
        Command::Compare => commands::compare_cmd(&mut ctx),
        Command::Marginal => commands::marginal_cmd(&mut ctx),
        Command::Sectors => commands::sectors_cmd(&mut ctx),
        Command::Fejer => commands::fejer_cmd(&mut ctx),
        Command::Annuli => commands::annuli_cmd(&mut ctx),
    };
    let (status, summary) = match &result {
        Ok(v) => ("ok", v.clone()),
        Err(f) => ("failed", json!({ "error": f.message })),
    };
    let manifest = json!({
        "tool": "orbitlim",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": cli.command.name(),
        "status": status,
        "config": cfg,
        "workers": cli.workers.unwrap_or_else(rayon::current_num_threads),
        "budget_elements": cli.budget_elements,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
        "summary": summary,
        "files": out.files(),
    });
    out.manifest(&manifest)?;
    eprintln!("{}: {status}, {} files in {}", cli.command.name(), out.files().len(), dir.display());
    result.map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
