// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for `qbo-core`.
//!
//! Every run resolves its settings from flags, then an optional `--config`
//! file, then built-in defaults, and records the resolved values in a
//! manifest at the top of the CSV it writes. A CSV produced by `qbo` can be
//! passed back through `--config` to repeat the run exactly.

pub mod args;
pub mod commands;
pub mod csv;
pub mod error;
pub mod manifest;
pub mod plot;
pub mod settings;
pub mod validate;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::{Outcome, Report};
use crate::error::{CliError, CliResult};
use crate::plot::Axes;
use crate::settings::Settings;

/// Environment variable fixing the size of the worker pool.
pub const THREADS_VAR: &str = "QBO_THREADS";

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code: 0 on success, 2 for usage errors, 1 otherwise.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return u8::try_from(e.exit_code()).unwrap_or(2);
        }
    };
    match configure_threads().and_then(|()| execute(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(text) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_VAR} must be a positive integer (got `{text}`)")))?;
    // A pool may already exist when `run` is called twice in one process;
    // the first configuration wins.
    if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
        log::debug!("global thread pool already initialised");
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Variance(_) => "variance",
        Command::Kurtosis(_) => "kurtosis",
        Command::Sweep(_) => "sweep",
        Command::Table1(_) => "table1",
        Command::Montecarlo(_) => "montecarlo",
        Command::Validate => "validate",
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let name = command_name(&cli.command);
    let settings = match &cli.config {
        Some(path) => Settings::from_file(path, name)?,
        None => Settings::empty(),
    };
    let axes = match cli.axes.as_deref() {
        None => None,
        Some(text) => Some(
            Axes::parse(text)
                .ok_or_else(|| CliError::usage(format!("--axes: expected loglog or linear (got `{text}`)")))?,
        ),
    };
    let outcome = match &cli.command {
        Command::Variance(a) => commands::variance(settings, a)?,
        Command::Kurtosis(a) => commands::kurtosis(settings, a)?,
        Command::Sweep(a) => commands::sweep(settings, a)?,
        Command::Table1(a) => commands::table1(settings, a)?,
        Command::Montecarlo(a) => commands::montecarlo(settings, a)?,
        Command::Validate => commands::validate(settings)?,
    };
    match outcome {
        Outcome::Done => Ok(()),
        Outcome::Data(report) => emit(cli, *report, axes),
    }
}

fn emit(cli: &Cli, report: Report, axes: Option<Axes>) -> CliResult<()> {
    let Report {
        dataset,
        manifest,
        axes: default_axes,
        scalar,
    } = report;
    if let Some(path) = &cli.plot {
        plot::emit_plot(&dataset, path, axes.unwrap_or(default_axes))?;
    }
    match &cli.out {
        Some(path) => csv::emit_csv(&dataset, &manifest, path),
        None if scalar => {
            println!("{}", dataset.rows[0][1]);
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            csv::write_csv(&dataset, &manifest, &mut stdout.lock()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}
