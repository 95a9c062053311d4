//! `esd`: runs the named ensemble-composition experiments and writes
//! plot-ready CSV or JSON-lines reports.
//!
//! Exit codes: `0` success, `1` verification failure, `2` usage or
//! configuration error.

#![forbid(unsafe_code)]

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod report;
pub mod scenarios;
pub mod verify;

pub use config::{OutputFormat, ScenarioConfig, Settings};
pub use report::ReportRow;
pub use scenarios::{run_scenario, ScenarioOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Bad flags, config file or numeric range.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Parser)]
#[command(name = "esd", version, about = "Ensemble-composition fluctuation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its report.
    Run(RunArgs),
    /// Print the scenario registry.
    List,
    /// Run the invariant suite.
    Verify,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat key = value file; flags override its entries.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// Number of molecules N.
    #[arg(long)]
    molecules: Option<u64>,
    /// Polarization for bell-braunstein (default 0.1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo rounds; 0 reports exact values only.
    #[arg(long)]
    rounds: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-molecule observable as Pauli terms, e.g. "ZZ" or "XX - YY".
    #[arg(long)]
    observable: Option<String>,
    /// csv or json-lines.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, UsageError> {
        let base = match &self.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
                Settings::parse(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
            }
            None => Settings::default(),
        };
        Ok(base.overlay(Settings {
            scenario: self.scenario.clone(),
            molecules: self.molecules,
            epsilon: self.epsilon,
            rounds: self.rounds,
            seed: self.seed,
            observable: self.observable.clone(),
            format: self.format.as_deref().map(str::parse).transpose()?,
            out: self.out.clone(),
        }))
    }
}

/// Renders a run into report bytes plus notes for stderr.
pub fn render(cfg: &ScenarioConfig) -> Result<(Vec<u8>, Vec<String>), UsageError> {
    let output = run_scenario(cfg)?;
    let mut bytes = Vec::new();
    report::write_rows(&output.rows, cfg.output_format, &mut bytes).expect("writing to memory succeeds");
    Ok((bytes, output.notes))
}

fn run(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), UsageError> {
    let settings = args.settings()?;
    let out_path = settings.out.clone();
    let cfg = ScenarioConfig::try_from(settings)?;
    let (bytes, notes) = render(&cfg)?;
    for note in notes {
        let _ = writeln!(stderr, "{note}");
    }
    match out_path {
        Some(path) => fs::write(&path, bytes).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(&bytes)
            .map_err(|e| UsageError(format!("cannot write report: {e}"))),
    }
}

fn list(stdout: &mut dyn Write) -> std::io::Result<()> {
    for s in &scenarios::REGISTRY {
        writeln!(stdout, "{}\n  {}\n  {}", s.name, s.summary, s.formula)?;
    }
    Ok(())
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => match run(&args, stdout, stderr) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_USAGE
            }
        },
        Command::List => match list(stdout) {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_USAGE,
        },
        Command::Verify => verify::verify(stdout).unwrap_or(EXIT_VERIFY_FAILED),
    }
}
