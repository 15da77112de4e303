//! `scrilab`: spectra, solver runs and the verification suite.
//!
//! Exit status: 0 when every check passes, 1 on a failed check, 2 on a configuration error,
//! 3 on a runtime error.

mod commands;
mod output;

use clap::{Parser, Subcommand};
use commands::Ctx;
use output::OutDir;
use scrilab::config::RunConfig;
use scrilab::scri_solver::transport::SolveOptions;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "scrilab", version, about = "Decay at null infinity in a modified harmonic gauge")]
struct Cli {
    /// JSON configuration; every field is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and JSON artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Serial sweeps and reductions; outputs are byte-identical across runs.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of the endomorphism A on Minkowski space.
    Spectra,
    /// Finite-difference extraction of A and B from the gauge-fixed operator.
    LinearizeCheck,
    /// Christoffel and curvature leading terms with remainder fits.
    TensorLedger,
    /// Damped scalar wave on Schwarzschild and its decay exponent at scri.
    Wave,
    /// The transport system with the full A and blockwise exponents.
    Transport,
    /// The 1-form analogue with gauge propagation.
    Maxwell,
    /// Picard iteration of the quasilinear model and Bondi mass loss.
    Bondi,
    /// The full invariant suite with a pass/fail summary.
    Verify {
        /// Comma-separated criteria to run (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
}

/// Marks errors that come from the configuration rather than from a run.
#[derive(Debug)]
pub struct ConfigFailure(pub String);

impl std::fmt::Display for ConfigFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigFailure {}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigFailure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigFailure(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| ConfigFailure(e.to_string()))?
        }
        None => RunConfig::default(),
    };
    cfg.apply_env(std::env::vars()).map_err(|e| ConfigFailure(e.to_string()))?;
    if cli.deterministic {
        cfg.deterministic = true;
    }
    cfg.validate().map_err(|e| ConfigFailure(e.to_string()))?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let out = OutDir::create(&cli.out)?;
    let ctx = Ctx { cfg, out: &out, opts: SolveOptions { parallel: !cfg.deterministic } };
    match &cli.command {
        Command::Spectra => commands::spectra(&ctx),
        Command::LinearizeCheck => commands::linearize_check(&ctx),
        Command::TensorLedger => commands::tensor_ledger(&ctx),
        Command::Wave => commands::wave(&ctx),
        Command::Transport => commands::transport(&ctx),
        Command::Maxwell => commands::maxwell(&ctx),
        Command::Bondi => commands::bondi(&ctx),
        Command::Verify { criteria } => commands::verify(&ctx, criteria.clone()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<ConfigFailure>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
