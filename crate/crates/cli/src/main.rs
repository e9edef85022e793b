mod args;
mod battery;
mod commands;
mod svg;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use eikinetic::vfld::write_atomic;
use eikinetic::Verdict;

use args::{Cli, Command};
use commands::{Body, Outcome, ResidualMode};

/// Caps the rayon pool; unset or 0 keeps the default.
const THREADS_ENV: &str = "EIKINETIC_THREADS";

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_ENV} must be an integer, got {v:?}"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
    }
    Ok(())
}

fn json_target(cmd: &Command) -> Option<&std::path::Path> {
    let i = match cmd {
        Command::Residual(a) | Command::Residual2d(a) | Command::Weak(a) => &a.input,
        Command::Classify(a) => &a.input,
        Command::Trace(a) => &a.input,
        Command::Umbilic(a) => &a.input,
        Command::Degree(a) => &a.input,
        Command::Entropy(a) => &a.input,
        Command::Reduce(a) => &a.input,
        _ => return None,
    };
    i.json.as_deref()
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    let outcome = match &cli.command {
        Command::Generate(a) => commands::generate(a)?,
        Command::Residual(a) => commands::residual(a, ResidualMode::Full)?,
        Command::Residual2d(a) => commands::residual(a, ResidualMode::Planar)?,
        Command::Weak(a) => commands::residual(a, ResidualMode::Weak)?,
        Command::Classify(a) => commands::classify(a)?,
        Command::Trace(a) => commands::trace(a)?,
        Command::Umbilic(a) => commands::umbilic(a)?,
        Command::Degree(a) => commands::degree(a)?,
        Command::Energy(a) => commands::energy(a)?,
        Command::Entropy(a) => commands::entropy(a)?,
        Command::Reduce(a) => commands::reduce(a)?,
        Command::Report(a) => commands::report(a)?,
    };
    let text = match &outcome.body {
        Body::Json(v) => serde_json::to_string_pretty(v)? + "\n",
        Body::Text(t) => t.clone(),
    };
    match json_target(&cli.command) {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => {
            // a closed pipe (`| head`) is not an error
            if let Err(e) = std::io::stdout().lock().write_all(text.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(o) if o.verdict == Verdict::Pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
