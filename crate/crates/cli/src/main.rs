//! `tasep`: exact evaluation, simulation, oracle computation, comparison and
//! identity checks from the command line.
//!
//! Exit status is 0 on success, 1 when a verification fails, 2 on usage
//! errors and 3 on resource or numeric errors.

mod commands;
mod config;
mod error;
mod grid;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{resolve_grid, resolve_identities, Cli, Command, GridDefaults};
use crate::error::CliError;
use crate::output::{Format, Table};

fn emit(table: &Table, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::resource(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(CliError::resource)?;
    }
    let (outcome, format, output) = match &cli.command {
        Command::Exact(a) => {
            let cfg = resolve_grid(&a.grid, None, None, a.perturb, GridDefaults::default())?;
            (commands::exact(&cfg)?, cfg.format, cfg.output)
        }
        Command::Simulate(a) => {
            let cfg = resolve_grid(&a.grid, Some(&a.mc), None, None, GridDefaults::default())?;
            (commands::simulate(&cfg)?, cfg.format, cfg.output)
        }
        Command::Oracle(a) => {
            let cfg = resolve_grid(&a.grid, None, a.tol, None, GridDefaults::default())?;
            (commands::oracle(&cfg)?, cfg.format, cfg.output)
        }
        Command::Compare(a) => {
            let cfg = resolve_grid(
                &a.grid,
                Some(&a.mc),
                a.tol,
                a.perturb,
                GridDefaults::compare(),
            )?;
            (commands::compare(&cfg)?, cfg.format, cfg.output)
        }
        Command::Identities(a) => {
            let cfg = resolve_identities(a)?;
            (commands::identities(&cfg)?, cfg.format, cfg.output)
        }
    };
    emit(&outcome.table, format, output.as_deref())?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
