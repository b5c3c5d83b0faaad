//! The `nmm` command-line tool.

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

pub mod args;
pub mod check;
pub mod commands;
pub mod config;
pub mod output;

use args::{Cli, Command};
use output::{CmdResult, Failure, EXIT_OK, EXIT_USAGE};

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    if let Err(msg) = configure_threads() {
        return report(&Failure::Usage(msg));
    }
    let merged = match config::merge_config(args, &Cli::command()) {
        Ok(a) => a,
        Err(msg) => return report(&Failure::Usage(msg)),
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => report(&f),
    }
}

fn dispatch(command: &Command) -> CmdResult<()> {
    let files = match command {
        Command::Curve(a) => commands::curve(a)?,
        Command::Ortho(a) => commands::ortho(a)?,
        Command::Gas(a) => commands::gas(a)?,
        Command::Toda(a) => commands::toda(a)?,
        Command::Levelspacing(a) => {
            let (files, sum) = commands::levelspacing(a)?;
            println!("sum = {sum}");
            files
        }
        Command::Check(a) => {
            if let Some(bad) = a.only.iter().find(|&&k| k == 0 || k > check::COUNT) {
                return Err(Failure::Usage(format!("no criterion {bad}; valid ids are 1..={}", check::COUNT)));
            }
            let failed = check::run(&a.only).iter().filter(|o| !o.passed).count();
            return if failed == 0 { Ok(()) } else { Err(Failure::ChecksFailed(failed)) };
        }
    };
    for f in files {
        println!("{f}");
    }
    Ok(())
}

fn report(f: &Failure) -> i32 {
    eprintln!("{}", f.diagnostics());
    f.exit_code()
}

/// `NMM_THREADS` caps the worker pool.
fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("NMM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("NMM_THREADS must be a positive integer, got `{value}`"))?;
    // A second call in the same process finds the pool already built; that is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
