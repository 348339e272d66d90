#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;
mod verify;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command, Settings};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(plap_core::Error),
    Io(std::io::Error),
    Verification(usize),
}

impl From<plap_core::Error> for CliError {
    fn from(e: plap_core::Error) -> Self {
        match e {
            plap_core::Error::InvalidParams(msg) => CliError::Usage(msg),
            other => CliError::Compute(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(plap_core::Error::NewtonDivergence { .. } | plap_core::Error::StepCollapse(_)) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
            CliError::Verification(_) => 3,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    let mut out = output::Sink::open(cli.out.as_deref())?;
    match cli.command {
        Command::Classify(a) => commands::classify(&settings, &a, &mut out),
        Command::Shoot(a) => commands::shoot(&settings, &a, &mut out),
        Command::Sweep(a) => commands::sweep(&settings, &a, &mut out),
        Command::Counterexample(a) => commands::counterexample(&settings, &a, &mut out),
        Command::Hadamard(a) => commands::hadamard(&settings, &a, &mut out),
        Command::Pohozaev(a) => commands::pohozaev(&settings, &a, &mut out),
        Command::Bvp(a) => commands::bvp(&settings, &a, &mut out),
        Command::Verify => verify::run(&mut out),
    }?;
    out.finish()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Usage(msg) => {
                    eprintln!("error: {msg}\n");
                    eprintln!("{}", Cli::command().render_usage());
                }
                CliError::Compute(e) => eprintln!("error: {e}"),
                CliError::Io(e) => eprintln!("error: {e}"),
                CliError::Verification(n) => eprintln!("verification failed: {n} check(s)"),
            }
            ExitCode::from(err.exit_code())
        }
    }
}
