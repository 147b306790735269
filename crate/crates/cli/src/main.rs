mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Args;
use commands::{commands, CliError, Ctx};
use rainbowlab::Error;
use report::{prune_unset, render, RunReport, SCHEMA_VERSION};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&args))
}

fn run(args: &Args) -> u8 {
    let registry = commands();
    let cmd = match registry.get(&args.command) {
        Ok(c) => c,
        Err(e) => return usage(&e.to_string()),
    };
    if args.verb.is_some() && cmd.verbs().is_empty() {
        return usage(&format!("{} takes no verb", cmd.name()));
    }
    let ctx = match Ctx::from_args(args) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let start = Instant::now();
    let outcome = rainbowlab::parallel::with_workers(ctx.workers, || cmd.run(&ctx, args));
    let (result, code) = match outcome {
        Ok(o) => (o.result, if o.definitive { EXIT_OK } else { EXIT_INCONCLUSIVE }),
        Err(CliError::Core(Error::BudgetExhausted(msg))) => {
            (json!({ "status": "unknown", "reason": msg }), EXIT_INCONCLUSIVE)
        }
        Err(e) => return fail(e),
    };
    let command = match &args.verb {
        Some(v) => format!("{} {v}", cmd.name()),
        None => cmd.name().to_owned(),
    };
    let report = RunReport {
        version: SCHEMA_VERSION,
        command,
        parameters: prune_unset(serde_json::to_value(args).expect("arguments serialize")),
        seed: args.seed,
        elapsed_ms: if args.no_timing { 0 } else { start.elapsed().as_millis() as u64 },
        result,
    };
    println!("{}", render(&report));
    code
}

fn usage(msg: &str) -> u8 {
    eprintln!("error: {msg}\n\n{}", commands::COMMAND_HELP);
    eprintln!("\nFor more information, try '--help'.");
    EXIT_USAGE
}

fn fail(e: CliError) -> u8 {
    match e {
        CliError::Usage(msg) => usage(&msg),
        CliError::Core(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
