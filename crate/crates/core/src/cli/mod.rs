//! Command-line front end: `run`, `validate` and `list-scenarios`.
//!
//! Exit status is 0 on success, 1 for an invalid configuration or an I/O
//! failure, and 2 for an unknown scenario name. Setting
//! [`OUTPUT_DIR_ENV`] overrides the output directory of every run.

pub mod config;
pub mod output;
pub mod scenarios;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{ConfigFile, Finding, RunConfig};

pub const OUTPUT_DIR_ENV: &str = "RINGCASCADE_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("unknown scenario `{0}`; valid names: {names}", names = scenarios::names().join(", "))]
    UnknownScenario(String),
    #[error("cannot parse configuration: {0}")]
    Config(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownScenario(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ringcascade", version, about = "Single-photon dynamics and spectra of cascaded ring-resonator arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the scenario described by a TOML configuration.
    Run { config: PathBuf },
    /// Check a configuration without writing anything.
    Validate { config: PathBuf },
    /// Print the registered scenario names.
    ListScenarios,
}

/// Outcome of a successful run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    pub warnings: Vec<Finding>,
}

fn format_findings(findings: &[Finding]) -> String {
    findings
        .iter()
        .map(|f| format!("{}: {}", f.field, f.message))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Load, resolve and check a configuration file.
pub fn load(path: &Path) -> Result<(RunConfig, Vec<Finding>), CliError> {
    config::resolve(&ConfigFile::load(path)?)
}

/// Run a resolved configuration and write its files.
pub fn run_config(cfg: &RunConfig, findings: Vec<Finding>) -> Result<RunReport, CliError> {
    let fatal: Vec<Finding> = findings.iter().filter(|f| f.fatal).cloned().collect();
    if !fatal.is_empty() {
        return Err(CliError::Invalid(format_findings(&fatal)));
    }
    let artifacts = scenarios::execute(cfg)?;
    let dir = match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => cfg.output_dir.clone(),
    };
    let mut files = output::write_all(&dir, cfg.format, &artifacts.tables, &artifacts.summary)?;
    files.push("manifest.json".into());
    let manifest = json!({
        "library": env!("CARGO_PKG_NAME"),
        "version": crate::VERSION,
        "scenario": cfg.scenario,
        "config": cfg,
        "files": files,
        "warnings": findings.iter().filter(|f| !f.fatal).collect::<Vec<_>>(),
    });
    output::write_manifest(&dir, &manifest)?;
    Ok(RunReport {
        output_dir: dir,
        files,
        warnings: findings.into_iter().filter(|f| !f.fatal).collect(),
    })
}

fn cmd_run(path: &Path) -> Result<(), CliError> {
    let (cfg, findings) = load(path)?;
    let report = run_config(&cfg, findings)?;
    for w in &report.warnings {
        eprintln!("warning: {}: {}", w.field, w.message);
    }
    println!("{}: wrote {} files to {}", cfg.scenario, report.files.len(), report.output_dir.display());
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<(), CliError> {
    let (cfg, findings) = load(path)?;
    if findings.is_empty() {
        println!("{}: ok", cfg.scenario);
        return Ok(());
    }
    for f in &findings {
        let level = if f.fatal { "error" } else { "warning" };
        println!("{level}: {}: {}", f.field, f.message);
    }
    let fatal: Vec<Finding> = findings.into_iter().filter(|f| f.fatal).collect();
    if fatal.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(format_findings(&fatal)))
    }
}

/// Entry point shared by the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Validate { config } => cmd_validate(&config),
        Command::ListScenarios => {
            for s in scenarios::SCENARIOS {
                println!("{:<26} {}", s.name, s.description);
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
