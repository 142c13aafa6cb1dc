use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gerbe_cli::{run, Cli, EXIT_FAILED, EXIT_INPUT, EXIT_OK, SEED_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { EXIT_OK as u8 });
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let report = match run(&cli, env_seed.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    let text = if cli.json { report.to_json() } else { report.to_string() };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(if report.pass { EXIT_OK } else { EXIT_FAILED } as u8)
}
