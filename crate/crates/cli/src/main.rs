//! `bergman`: command-line analyses of the Bergman geometry of the classical
//! Cartan domains and of compactness evidence for composition operators.
//!
//! Exit codes: 0 on success, 1 when an assertion-style check fails (an
//! identity residual above tolerance), 2 on input errors. Errors are
//! reported as a structured JSON record on stderr.

mod battery;
mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub struct CliError {
    pub exit_code: u8,
    pub tag: String,
    pub detail: String,
}

impl CliError {
    pub fn input(tag: &str, detail: String) -> Self {
        CliError {
            exit_code: 2,
            tag: tag.into(),
            detail,
        }
    }

    pub fn failure(tag: &str, detail: String) -> Self {
        CliError {
            exit_code: 1,
            tag: tag.into(),
            detail,
        }
    }

    pub fn from_core(err: bergman_core::Error) -> Self {
        use bergman_core::Error as E;
        let tag = match &err {
            E::OutsideDomain => "outside-domain",
            E::DimensionMismatch { .. } => "dimension-mismatch",
            E::TooCloseToBoundary { .. } => "too-close-to-boundary",
            E::InvalidDescriptor(_) => "invalid-descriptor",
            E::InvalidParameter(_) => "invalid-parameter",
            E::TypeMismatch(_) => "type-mismatch",
            E::NoMatrixForm(_) => "no-matrix-form",
            E::Conditioning(_) => "conditioning",
        };
        CliError::input(tag, err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "bergman",
    version,
    about = "Bergman metrics, Möbius automorphisms and composition-operator diagnostics on the classical Cartan domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: json (default) or csv where supported.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Seed override for every sampled quantity.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Sample-count override for the sampling analyses.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Worker threads for the sampling loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the metric Gram matrix, its eigenvalue range, and H_z(u,u).
    Metric,
    /// Run the Möbius automorphism identity battery.
    CheckIdentities,
    /// Sample the distortion-ratio profile of a self-map and give a verdict.
    RatioProfile,
    /// Build an extremal test function and report its contract checks.
    Testfn,
    /// Drive the image toward the boundary and watch composed seminorms.
    SequenceProbe,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // ignore failures: the pool may already be initialized in tests
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let mut record = report::Json::object();
            record.push("error", report::Json::Str(err.tag.clone()));
            record.push("detail", report::Json::Str(err.detail.clone()));
            eprint!("{}", report::to_string(&record));
            ExitCode::from(err.exit_code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::input("invalid-parameter", "--config is required".into()))?;
    let raw = std::fs::read(config_path)
        .map_err(|e| CliError::input("io-error", format!("{}: {e}", config_path.display())))?;
    let parsed = config::parse_config(
        std::str::from_utf8(&raw).map_err(|e| CliError::input("parse-error", e.to_string()))?,
    )?;
    let ctx = commands::Context::new(cli, parsed, report::config_hash(&raw))?;
    let rendered = match cli.command {
        Command::Metric => commands::cmd_metric(&ctx)?,
        Command::CheckIdentities => commands::cmd_check_identities(&ctx)?,
        Command::RatioProfile => commands::cmd_ratio_profile(&ctx)?,
        Command::Testfn => commands::cmd_testfn(&ctx)?,
        Command::SequenceProbe => commands::cmd_sequence_probe(&ctx)?,
    };
    match &ctx.out_path {
        Some(path) => std::fs::write(path, rendered.text.as_bytes())
            .map_err(|e| CliError::input("io-error", format!("{}: {e}", path.display())))?,
        None => print!("{}", rendered.text),
    }
    if let Some(failure) = rendered.failure {
        return Err(failure);
    }
    Ok(())
}
