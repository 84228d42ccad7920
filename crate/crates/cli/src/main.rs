mod args;
mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Failure, Outcome};

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    let file = cli.config.as_deref().map(config::load).transpose()?;
    let file = file.as_ref();
    match cli.command {
        Command::Spectrum(a) => commands::spectrum(a, file),
        Command::Sturmian(a) => commands::sturmian(a, file),
        Command::Angular(a) => commands::angular(a, file),
        Command::Coherent(a) => commands::coherent(a, file),
        Command::Evolve(a) => commands::evolve_trace(a, file),
        Command::Verify(a) => commands::verify_suite(a, file),
        Command::Errata(a) => commands::errata_table(a, file),
    }
}

fn write(outcome: &Outcome, command: &str) -> std::io::Result<()> {
    let bytes = output::render(&outcome.meta, &outcome.table, outcome.format);
    match output::destination(outcome.output.clone(), command, outcome.format) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, bytes)
        }
        None => std::io::stdout().lock().write_all(&bytes),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = cli.command.name();
    match dispatch(cli) {
        Err(Failure::Config(e)) => {
            eprintln!("micz {command}: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("micz {command}: numerical failure: {e}");
            ExitCode::from(2)
        }
        Ok(outcome) => {
            if let Err(e) = write(&outcome, command) {
                eprintln!("micz {command}: cannot write output: {e}");
                return ExitCode::from(1);
            }
            match &outcome.failure {
                Some(msg) => {
                    eprintln!("micz {command}: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
    }
}
