mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use koehler_core::report::all_passed;
use koehler_core::Error;

use args::{Cli, Command};
use output::{digest, Report, SCHEMA};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } | Error::InternalInconsistency(_) | Error::Singular { .. } => EXIT_INTERNAL,
        _ => EXIT_BAD_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol < 1e-2) || !(g.epsilon > 0.0) || g.horizon == 0 {
        eprintln!("error: tol must lie in (0, 1e-2), epsilon must be positive and horizon nonzero");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Decompose { input, method } => commands::decompose_cmd(input, *method, g),
        Command::Cyclicity { input, k_max } => commands::cyclicity_cmd(input, *k_max, g),
        Command::Semigroup { generators, cap } => commands::semigroup_cmd(generators, *cap, g),
        Command::Ipsearch { set, length } => commands::ipsearch_cmd(set, *length, g),
        Command::Fixtures { list, emit } => commands::fixtures_cmd(*list, emit.as_deref()),
        Command::Battery { seed, count } => commands::battery_cmd(*seed, *count, g),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let passed = all_passed(&outcome.blocks);
    let report = Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        analysis: outcome.analysis,
        input_digest: digest(&outcome.input),
        result: outcome.result,
        blocks: outcome.blocks,
        wall_time_ms: start.elapsed().as_millis(),
    };
    match serde_json::to_string_pretty(&report) {
        Ok(s) => {
            let _ = writeln!(std::io::stdout().lock(), "{s}");
        }
        Err(e) => {
            eprintln!("error: serializing report: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        for b in report.blocks.iter().filter(|b| !b.passed()) {
            eprintln!("failed: {} ({})", b.name, b.violations().join(", "));
        }
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
