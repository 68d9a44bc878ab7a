mod args;
mod error;
mod input;
mod response;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use run::Stage;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Schema => {
            emit(response::SCHEMA);
            return ExitCode::SUCCESS;
        }
        Command::OneD(a) => run::run_one_d(a, Stage::Formula, None),
        Command::Multi(a) => run::run_multi(a, Stage::Formula, None),
        Command::Truncated(a) => run::run_truncated(a, Stage::Formula, None),
        Command::Oracle { target } => run::run_target(target, Stage::Oracle),
        Command::Verify { target } => run::run_target(target, Stage::Verify),
    };
    match outcome {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => response::to_json(&out.response),
                Format::Plain => response::to_plain(&out.response),
            };
            emit(&format!("{text}\n"));
            if !out.response.defined {
                eprintln!("moment undefined: {}", out.response.reason);
            }
            if let Some(v) = out.response.verification.as_ref().filter(|v| !v.pass) {
                eprintln!("verification failed{}", v.note.as_ref().map(|n| format!(": {n}")).unwrap_or_default());
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("tmoment: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Write to stdout, ignoring a closed pipe (e.g. output piped into `head`).
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}
