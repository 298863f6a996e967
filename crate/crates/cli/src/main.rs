mod commands;
mod config;
mod error;
mod joint;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::error::CliError;

/// Exact post-selected pointer readouts: distinguishability, shift sweeps,
/// weak echoes and self-checks, written as CSV.
#[derive(Parser)]
#[command(name = "weakecho", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path; multi-table runs append `-<label>` to the stem.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    #[arg(long, global = true)]
    domain_halfwidth: Option<f64>,
    #[arg(long, global = true)]
    echo_threshold: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// D_10 against strength for each pointer family.
    Distinguishability,
    /// Conditional shifts over linear and equatorial input states.
    ShiftSweep,
    /// Local maxima of |D_10| away from the origin.
    EchoScan,
    /// Residuals of the weak value conditions.
    VerifyConditions,
    /// Distance between the complex shift and the weak value as eta shrinks.
    AavConvergence,
    /// Readout formula against the brute-force projected state.
    OracleCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Distinguishability => "distinguishability",
            Self::ShiftSweep => "shift-sweep",
            Self::EchoScan => "echo-scan",
            Self::VerifyConditions => "verify-conditions",
            Self::AavConvergence => "aav-convergence",
            Self::OracleCheck => "oracle-check",
        }
    }
}

fn usage(message: String) -> CliError {
    CliError::Config {
        line: 0,
        column: 0,
        message,
    }
}

fn load(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        None => Config::builtin(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.display().to_string(),
                source,
            })?;
            let mut cfg = Config::parse(&text)?;
            cfg.resolve_paths(path.parent().unwrap_or(std::path::Path::new("")));
            cfg
        }
    };
    if let Some(n) = cli.grid_points {
        if n < weakecho::grid::MIN_POINTS || n.is_multiple_of(2) {
            return Err(usage(format!(
                "--grid-points must be odd and at least {}, got {n}",
                weakecho::grid::MIN_POINTS
            )));
        }
        cfg.grid.points = n;
    }
    if let Some(l) = cli.domain_halfwidth {
        if !(l.is_finite() && l > 0.0) {
            return Err(usage(format!(
                "--domain-halfwidth must be positive, got {l}"
            )));
        }
        cfg.grid.half_width = Some(l);
    }
    if let Some(t) = cli.echo_threshold {
        if !t.is_finite() {
            return Err(usage(format!("--echo-threshold must be finite, got {t}")));
        }
        cfg.echo_scan.threshold = t;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load(cli)?;
    let outcome = match cli.command {
        Command::Distinguishability => commands::distinguishability(&cfg),
        Command::ShiftSweep => commands::shift_sweeps(&cfg),
        Command::EchoScan => commands::echo_scans(&cfg),
        Command::VerifyConditions => commands::verify_conditions(&cfg),
        Command::AavConvergence => commands::aav(&cfg),
        Command::OracleCheck => commands::oracle_check(&cfg),
    }?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));
    let written = output::write_tables(&out, &outcome.tables)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for (path, table) in written.iter().zip(&outcome.tables) {
        println!("wrote {} ({} rows)", path.display(), table.rows.len());
    }
    match outcome.violation {
        Some(v) => Err(CliError::Contract(v)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
