mod args;
mod commands;
mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Cli;
use commands::{Context, Failure};
use report::{round_numbers, RunReport};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INTERNAL: u8 = 1;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }

    let start = Instant::now();
    let mut ctx = Context {
        seed: cli.seed,
        inputs: BTreeMap::new(),
    };
    let (mut results, code) = match commands::run(&cli.command, &mut ctx) {
        Ok(out) if out.pass => (out.results, 0),
        Ok(out) => (out.results, EXIT_VALIDATION),
        Err(Failure::Validation(msg)) => (json!({ "error": msg }), EXIT_VALIDATION),
        Err(Failure::Internal(msg)) => (json!({ "error": msg }), EXIT_INTERNAL),
    };
    round_numbers(&mut results);

    let report = RunReport {
        command: commands::name(&cli.command),
        inputs: ctx.inputs,
        results,
        seed: cli.seed,
        wall_time: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let mut stdout = std::io::stdout().lock();
    let written = serde_json::to_writer_pretty(&mut stdout, &report)
        .map_err(std::io::Error::from)
        .and_then(|_| writeln!(stdout));
    if written.is_err() {
        return ExitCode::from(EXIT_INTERNAL);
    }
    if let Some(msg) = report.results.get("error").and_then(|m| m.as_str()) {
        eprintln!("error: {msg}");
    }
    ExitCode::from(code)
}
