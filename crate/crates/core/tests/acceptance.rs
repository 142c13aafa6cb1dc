//! Runs every acceptance criterion and prints one PASS/FAIL line for each.

use std::time::Instant;

use gerbe_core::suites::{run_criterion, CRITERIA, DEFAULT_SEED};

fn main() {
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = run_criterion(c.id, DEFAULT_SEED);
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match &outcome {
            Ok(r) => (r.pass() && secs <= c.budget, format!("{}", r)),
            Err(e) => (false, format!("error: {}", e)),
        };
        println!(
            "{} criterion {:>2}: {} [{:.2}s of {:.0}s]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            secs,
            c.budget
        );
        for line in detail.lines() {
            println!("      {}", line);
        }
        if !pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {:?}", failed);
        std::process::exit(1);
    }
}
