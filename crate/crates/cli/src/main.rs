mod args;
mod checks;
mod commands;
mod report;
mod tuples;
mod verify;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use nilcert::{Error, Result};
use serde_json::json;

use args::{Cli, Command, Options};
use report::{Inputs, RunReport, Status};

fn options(cli: &Cli) -> Result<Options> {
    let quotient_cap = match cli.quotient_cap {
        Some(c) => Some(c),
        None => match std::env::var("NILCERT_QUOTIENT_CAP") {
            Ok(s) => Some(s.trim().parse().map_err(|_| Error::Input(format!("NILCERT_QUOTIENT_CAP={s} is not a number")))?),
            Err(_) => None,
        },
    };
    Ok(Options { budget: cli.budget, quotient_cap, seed: cli.seed })
}

fn run(cli: &Cli) -> Result<Status> {
    let start = Instant::now();
    let opts = options(cli)?;
    let inputs = Inputs::from_disk();
    let (outcome, verification) = match &cli.command {
        Command::Verify { file } => (verify::verify(file, &inputs, &opts)?, Vec::new()),
        cmd => {
            let outcome = commands::execute(cmd, &inputs, &opts)?;
            let log = checks::check(cmd, &inputs, &opts, &outcome.result)?;
            (outcome, log)
        }
    };
    let mut out = String::new();
    if cli.json {
        out = format!("{}\n", outcome.result);
    } else {
        out.push_str(&outcome.text);
        for line in &verification {
            out.push_str(&format!("verified: {line}\n"));
        }
    }
    if let Some(path) = &cli.save_report {
        let report = RunReport {
            command: cli.command.name().into(),
            arguments: cli.command.clone(),
            options: opts,
            inputs: inputs.into_records(),
            status: outcome.status,
            result: outcome.result,
            verification,
            wall_time_ms: start.elapsed().as_secs_f64() * 1000.0,
        };
        let text = serde_json::to_string_pretty(&report).expect("serializable");
        std::fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    }
    let _ = std::io::stdout().write_all(out.as_bytes());
    Ok(outcome.status)
}

/// Resource limits are reported like Unknown so that scripts can retry with larger caps.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } | Error::BudgetExhausted(_) | Error::ClassCap(..) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };
    match run(&cli) {
        Ok(Status::Decided) => ExitCode::SUCCESS,
        Ok(Status::Unknown) => ExitCode::from(2),
        Err(e) => {
            if cli.json {
                println!("{}", json!({"error": {"code": e.code(), "message": e.to_string()}}));
            }
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
