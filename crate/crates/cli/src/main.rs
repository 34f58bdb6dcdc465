//! `lg`: datasets for Leggett-Garg analyses of the harmonic oscillator.

mod commands;
mod config;
mod output;
mod parse;

use std::process::ExitCode;

use clap::Parser;
use qho_lg::Error;

use crate::commands::{run, Cli};

const THREADS_VAR: &str = "LG_THREADS";

fn fail(code: &str, msg: &str, status: u8) -> ExitCode {
    let msg = msg.lines().next().unwrap_or("").trim();
    eprintln!("error code={code} msg={msg}");
    ExitCode::from(status)
}

fn fail_with(e: &Error) -> ExitCode {
    fail(e.code(), &e.to_string(), if e.is_numeric() { 3 } else { 2 })
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(Error::InvalidInput(format!("{THREADS_VAR} must be positive")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidInput(e.to_string()))
}

fn main() -> ExitCode {
    let argv = match config::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return fail_with(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            return fail("USAGE", &first, 2);
        }
    };
    if let Err(e) = init_threads() {
        return fail_with(&e);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail_with(&e),
    }
}
