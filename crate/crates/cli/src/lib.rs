//! `dgsim` command-line driver.
//!
//! ```text
//! dgsim <subcommand> --config <path> [--out <dir>]
//! ```
//!
//! Each run writes `report.json` (`{command, config, result}`) and one or more
//! CSV files to the output directory and prints a one-line summary.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "dgsim", version, about = "Doebner-Goldin nonlinear quantum dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a Gaussian packet, optionally cross-checking the direct integrator.
    Evolve(Common),
    /// Gauged overlap of the two-plateau states.
    Overlap(Common),
    /// Signalling demonstration with a pulse on the distant side.
    Ftl(Common),
    /// Statistics of two ensembles with the same density matrix.
    Mixture(Common),
    /// Position-scaling limit of the gauged momentum.
    Momentum(Common),
    /// Conservation of gauged against ungauged momentum.
    Conservation(Common),
    /// Intertwiner identities and the lattice isomorphism.
    Logic(Common),
    /// Axioms of a gauged spectral measure.
    GpvmCheck(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides `out_dir` from the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Command {
    fn split(&self) -> (&'static str, &Common, fn(&RunConfig) -> commands::Run) {
        match self {
            Self::Evolve(c) => ("evolve", c, commands::evolve),
            Self::Overlap(c) => ("overlap", c, commands::overlap),
            Self::Ftl(c) => ("ftl", c, commands::ftl),
            Self::Mixture(c) => ("mixture", c, commands::mixture),
            Self::Momentum(c) => ("momentum", c, commands::momentum),
            Self::Conservation(c) => ("conservation", c, commands::conservation),
            Self::Logic(c) => ("logic", c, commands::logic),
            Self::GpvmCheck(c) => ("gpvm-check", c, commands::gpvm_check),
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: &'a RunConfig,
    result: &'a serde_json::Value,
}

/// Sizes the global rayon pool from `DGSIM_THREADS`, if set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DGSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(CliError::Threads(raw)),
    };
    // a pool that already exists (a second run in one process) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn write_outputs(dir: &Path, report: &Report, csv: &[(String, String)]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    std::fs::write(dir.join("report.json"), json)?;
    for (name, body) in csv {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn execute(cmd: &Command) -> Result<String, CliError> {
    let (name, common, run) = cmd.split();
    let mut cfg = parse_config(&common.config)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    configure_threads()?;
    let outcome = run(&cfg)?;
    let report = Report {
        command: name,
        config: &cfg,
        result: &outcome.result,
    };
    write_outputs(&cfg.out_dir, &report, &outcome.csv)?;
    Ok(outcome.summary)
}

/// Runs `dgsim` with the given arguments (including the program name) and
/// returns the process exit code: 0 on success, 2 for usage and config
/// errors, 1 for failures while running.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("dgsim {}: {e}", cli.command.split().0);
            e.exit_code()
        }
    }
}
