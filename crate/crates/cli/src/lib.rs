//! Command-line surface of `srf-core`: argument parsing, subcommand dispatch
//! and JSON/CSV report emission.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Format, RunConfig};
use error::{CliResult, EXIT_CHECKS_FAILED, EXIT_PASS, EXIT_USAGE};
use report::{Outcome, Report, Status};

/// Parses `argv`, runs the subcommand and returns the report with its outcome.
pub fn run_to_report<I, T>(argv: I) -> CliResult<(Report, Outcome)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| error::CliError::Usage(e.to_string()))?;
    let config = RunConfig::from_cli(&cli)?;
    commands::validate(&config)?;
    if let Some(n) = config.threads {
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = commands::execute(&config)?;
    Ok((Report::new(config, &outcome), outcome))
}

/// Runs the CLI and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<T> = argv.into_iter().collect();
    if let Err(e) = Cli::try_parse_from(argv.clone()) {
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            return EXIT_PASS;
        }
        eprint!("{e}");
        return EXIT_USAGE;
    }
    match run_to_report(argv).and_then(|(report, outcome)| emit(&report, &outcome).map(|_| report.status)) {
        Ok(Status::Pass) => EXIT_PASS,
        Ok(Status::Fail | Status::Partial) => EXIT_CHECKS_FAILED,
        Err(e) => {
            eprintln!("srf: {e}");
            e.exit_code()
        }
    }
}

fn emit(report: &Report, outcome: &Outcome) -> CliResult<()> {
    let text = match report.config.format {
        Format::Json => report.to_json()?,
        Format::Csv => report::to_csv(outcome)?,
    };
    match &report.config.output_path {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
