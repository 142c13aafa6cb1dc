//! Command-line harness for gerbe-core: scenario files, commands and reports.

pub mod commands;
pub mod report;
pub mod scenario;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::CliError;
use report::MachineReport;

/// Environment variable overriding the scenario seed.
pub const SEED_ENV: &str = "GERBE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gerbe", version, about = "Holonomy and transgression of gerbes on orbifold groupoids")]
pub struct Cli {
    /// Write the machine report (JSON) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the machine report on stdout instead of the human rendering.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for sampled checks; overrides GERBE_SEED and the scenario.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Record wall time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the cocycle conditions of every cochain section.
    Verify { scenario: PathBuf },
    /// Holonomy of the line data around a loop.
    Tau1 {
        scenario: PathBuf,
        #[arg(long = "loop")]
        loop_id: String,
    },
    /// Transgressed bundle: F on a loop arrow and/or Delta on a tangent.
    Tau2 {
        scenario: PathBuf,
        #[arg(long)]
        arrow: Option<String>,
        #[arg(long)]
        tangent: Option<String>,
    },
    /// Flat transgression of degree n on composable loop arrows.
    Taun {
        scenario: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        arrows: Vec<String>,
    },
    /// Transgression against the coboundary on the scenario's arrows and families.
    Square { scenario: PathBuf },
    /// Objects and fixed sets of the inertia groupoid.
    Inertia { scenario: PathBuf },
    /// Twisted sectors, with the local system of the gerbe section if present.
    Sectors { scenario: PathBuf },
    /// Schur multiplier of a finite group.
    H2 {
        #[arg(long)]
        group: String,
    },
    /// Representative discrete-torsion cocycle of a class.
    Torsion {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',')]
        class: Vec<u64>,
    },
    /// Built-in acceptance suites.
    Selftest {
        #[arg(long)]
        criterion: Option<usize>,
    },
}

impl Command {
    pub fn scenario(&self) -> Option<&Path> {
        match self {
            Command::Verify { scenario }
            | Command::Tau1 { scenario, .. }
            | Command::Tau2 { scenario, .. }
            | Command::Taun { scenario, .. }
            | Command::Square { scenario }
            | Command::Inertia { scenario }
            | Command::Sectors { scenario } => Some(scenario),
            Command::H2 { .. } | Command::Torsion { .. } | Command::Selftest { .. } => None,
        }
    }
}

/// Seed precedence: flag, then environment, then scenario, then `fallback`.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, scenario: Option<u64>, fallback: u64) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = env {
        return v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{} = `{}` is not an unsigned integer", SEED_ENV, v)));
    }
    Ok(scenario.unwrap_or(fallback))
}

pub fn run(cli: &Cli, env_seed: Option<&str>) -> Result<MachineReport, CliError> {
    let start = Instant::now();
    let sc = cli.command.scenario().map(scenario::load).transpose()?;
    let fallback = match cli.command {
        Command::Selftest { .. } => gerbe_core::suites::DEFAULT_SEED,
        _ => 0,
    };
    let seed = resolve_seed(cli.seed, env_seed, sc.as_ref().map(|s| s.seed), fallback)?;
    let sc = sc.as_ref();
    let mut report = match &cli.command {
        Command::Verify { .. } => commands::verify(sc.expect("scenario"), seed),
        Command::Tau1 { loop_id, .. } => commands::tau1(sc.expect("scenario"), seed, loop_id),
        Command::Tau2 { arrow, tangent, .. } => {
            commands::tau2(sc.expect("scenario"), seed, arrow.as_deref(), tangent.as_deref())
        }
        Command::Taun { n, arrows, .. } => commands::taun(sc.expect("scenario"), seed, *n, arrows),
        Command::Square { .. } => commands::square(sc.expect("scenario"), seed),
        Command::Inertia { .. } => commands::inertia_cmd(sc.expect("scenario"), seed),
        Command::Sectors { .. } => commands::sectors(sc.expect("scenario"), seed),
        Command::H2 { group } => commands::h2(group, seed),
        Command::Torsion { group, class } => commands::torsion(group, class, seed),
        Command::Selftest { criterion } => commands::selftest(*criterion, seed),
    }?;
    if cli.timing {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some("2"), Some(3), 4).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some(" 2 "), Some(3), 4).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, Some(3), 4).unwrap(), 3);
        assert_eq!(resolve_seed(None, None, None, 4).unwrap(), 4);
        assert!(matches!(resolve_seed(None, Some("-1"), None, 0), Err(CliError::Input(_))));
    }
}
