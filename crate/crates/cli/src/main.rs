mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;
use crystalline::acceptance::{genuine_polys, run_suite, tampered_polys};

use args::{Cli, Command};
use commands::Ctx;

/// Exit code 1 for domain errors, 2 for usage errors.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(crystalline::Error),
}

impl From<crystalline::Error> for CliError {
    fn from(e: crystalline::Error) -> Self {
        CliError::Domain(e)
    }
}

fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let ctx = Ctx { seed: cli.seed, precision: cli.precision };
    let out = match &cli.command {
        Command::Witt(c) => commands::witt(c, &ctx)?,
        Command::Polygon(c) => commands::polygon(c)?,
        Command::Crystal(c) => commands::crystal(c, &ctx)?,
        Command::Form(c) => commands::form(c, &ctx)?,
        Command::K3(c) => commands::k3(c, &ctx)?,
        Command::Fgl(c) => commands::fgl(c, &ctx)?,
        Command::Census { p } => commands::census(*p)?,
        Command::Quartic(c) => commands::quartic(c)?,
        Command::Strata(c) => commands::strata(c)?,
        Command::Check(c) => commands::check(c)?,
        Command::Validate { files } => commands::validate(files)?,
        Command::Acceptance { suite, tamper } => {
            let outcomes = if *tamper { run_suite(suite, &tampered_polys) } else { run_suite(suite, &genuine_polys) }
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let all_passed = outcomes.iter().all(|o| o.passed);
            let mut lines: Vec<String> = outcomes.iter().map(|o| o.line()).collect();
            let passed = outcomes.iter().filter(|o| o.passed).count();
            lines.push(format!("{passed}/{} criteria passed", outcomes.len()));
            return Ok((lines.join("\n"), all_passed));
        }
    };
    Ok((out.render(cli.json), true))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((text, ok)) => {
            println!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
