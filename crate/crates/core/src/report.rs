//! Verification outcomes.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    /// Largest residual seen (0 for exact agreement).
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Decided by exact arithmetic.
    pub exact: bool,
    pub samples: usize,
    /// Where the worst residual occurred.
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: &str, residual: f64, tolerance: f64, exact: bool, samples: usize, witness: Option<String>) -> Check {
        let pass = if exact { residual == 0.0 } else { residual <= tolerance };
        Check {
            name: name.to_string(),
            residual,
            tolerance: if exact { 0.0 } else { tolerance },
            pass,
            exact,
            samples,
            witness,
        }
    }

    /// A check decided by a boolean rather than a residual.
    pub fn flag(name: &str, pass: bool, witness: Option<String>) -> Check {
        Check {
            name: name.to_string(),
            residual: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass,
            exact: true,
            samples: 1,
            witness,
        }
    }
}

/// Running maximum of a residual with its witness.
#[derive(Clone, Debug, Default)]
pub struct Worst {
    pub residual: f64,
    pub witness: Option<String>,
    pub samples: usize,
    pub exact: bool,
}

impl Worst {
    pub fn new() -> Worst {
        Worst {
            residual: 0.0,
            witness: None,
            samples: 0,
            exact: true,
        }
    }

    pub fn record(&mut self, residual: f64, exact: bool, witness: impl FnOnce() -> String) {
        self.samples += 1;
        self.exact &= exact;
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        if r > self.residual || (self.witness.is_none() && r > 0.0) {
            self.residual = r;
            self.witness = Some(witness());
        }
    }

    pub fn into_check(self, name: &str, tolerance: f64) -> Check {
        let exact = self.exact && self.samples > 0;
        Check::new(name, self.residual, tolerance, exact, self.samples, self.witness)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(
                f,
                "{:<4} {:<40} residual {:.3e} ({} samples{})",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.residual,
                c.samples,
                if c.exact { ", exact" } else { "" }
            )?;
            if let (false, Some(w)) = (c.pass, &c.witness) {
                write!(f, " at {}", w)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
