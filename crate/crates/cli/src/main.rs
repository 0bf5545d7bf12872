//! `triality`: grid scans, verification runs and figure data for the kaon
//! triality model.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! configuration error. Nothing is written unless the command succeeds.

mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;
use triality_core::verification::{run_all, scan};

use config::{CommonArgs, Format};

#[derive(Debug, Parser)]
#[command(name = "triality", version, about = "Kaon triality scans and verification")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every measure on the tau grid and emit CSV
    Scan,
    /// Run the verification checks; exit 1 if any fails
    Verify,
    /// Emit the data behind one of the three figures
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot write to stdout: {0}")]
    Stdout(std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] triality_core::Error),
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Rendered output plus whether every check passed.
struct Outcome {
    body: String,
    passed: bool,
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = config::resolve(&cli.common)?;
    let format = cli.common.format;
    match cli.command {
        Command::Scan | Command::Figure { .. } if format == Some(Format::Report) => {
            Err(CliError::Usage("--format report is only valid for `verify`".into()))
        }
        Command::Scan => Ok(Outcome {
            body: output::scan_csv(&scan(&cfg)?),
            passed: true,
        }),
        Command::Figure { which } => Ok(Outcome {
            body: output::figure_csv(which, &scan(&cfg)?),
            passed: true,
        }),
        Command::Verify => {
            let report = run_all(&cfg)?;
            let body = match format.unwrap_or(Format::Report) {
                Format::Report => report.to_text(),
                Format::Csv => output::report_csv(&report),
            };
            Ok(Outcome {
                body,
                passed: report.all_passed(),
            })
        }
    }
}

fn emit(body: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(CliError::Stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = execute(&cli).and_then(|outcome| {
        emit(&outcome.body, cli.common.out.as_ref())?;
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
