//! The machine report, the stable output contract of every command.

use std::fmt;

use gerbe_core::report::{Check, Report};
use gerbe_core::Scalar;
use serde::Serialize;

pub const REPORT_SCHEMA: &str = "gerbe-report/1";

/// A computed quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Value {
    /// `exp(2πi·angle)` with `angle = "p/q"` in `[0, 1)`.
    Phase { angle: String },
    Complex { re: f64, im: f64 },
    Integers { values: Vec<u64> },
    Text { text: String },
}

impl Value {
    pub fn scalar(s: Scalar) -> Value {
        match s {
            Scalar::Phase(r) => Value::Phase { angle: r.to_string() },
            Scalar::Num(z) => Value::Complex { re: z.re, im: z.im },
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text { text: s.into() }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Phase { angle } => write!(f, "exp(2 pi i * {})", angle),
            Value::Complex { re, im } => write!(f, "{:+.12e} {:+.12e}i", re, im),
            Value::Integers { values } => write!(f, "{:?}", values),
            Value::Text { text } => f.write_str(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// `null` when the residual is not finite.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub exact: bool,
    pub samples: usize,
    pub witness: Option<String>,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        CheckRecord {
            name: c.name.clone(),
            residual: c.residual.is_finite().then_some(c.residual),
            tolerance: c.tolerance,
            pass: c.pass,
            exact: c.exact,
            samples: c.samples,
            witness: c.witness.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MachineReport {
    pub schema: &'static str,
    pub command: String,
    /// Digest of the scenario bytes, absent for commands without a scenario.
    pub scenario: Option<String>,
    pub seed: u64,
    pub pass: bool,
    pub values: Vec<Entry>,
    pub checks: Vec<CheckRecord>,
    /// Only with `--timing`, so that reports are reproducible by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl MachineReport {
    pub fn new(command: &str, scenario: Option<String>, seed: u64) -> MachineReport {
        MachineReport {
            schema: REPORT_SCHEMA,
            command: command.to_string(),
            scenario,
            seed,
            pass: true,
            values: Vec::new(),
            checks: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn value(&mut self, name: impl Into<String>, value: Value) {
        self.values.push(Entry {
            name: name.into(),
            value,
        });
    }

    pub fn checks(&mut self, r: &Report) {
        for c in &r.checks {
            self.check(c);
        }
    }

    pub fn check(&mut self, c: &Check) {
        self.pass &= c.pass;
        self.checks.push(c.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

impl fmt::Display for MachineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.command, if self.pass { "PASS" } else { "FAIL" })?;
        if let Some(d) = &self.scenario {
            writeln!(f, "  scenario {}", d)?;
        }
        writeln!(f, "  seed {}", self.seed)?;
        for e in &self.values {
            writeln!(f, "  {} = {}", e.name, e.value)?;
        }
        for c in &self.checks {
            let residual = c.residual.map_or("inf".to_string(), |r| format!("{:.3e}", r));
            write!(
                f,
                "  {:<4} {:<44} residual {} (tol {:.1e}, {} samples{})",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                residual,
                c.tolerance,
                c.samples,
                if c.exact { ", exact" } else { "" }
            )?;
            if let (false, Some(w)) = (c.pass, &c.witness) {
                write!(f, " at {}", w)?;
            }
            writeln!(f)?;
        }
        if let Some(ms) = self.wall_time_ms {
            writeln!(f, "  wall time {:.1} ms", ms)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn values_serialize_with_a_kind_tag() {
        let v = Value::scalar(Scalar::phase(Rational64::new(3, 4)));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"kind":"phase","angle":"3/4"}"#);
        assert_eq!(v.to_string(), "exp(2 pi i * 3/4)");
        let v = Value::Integers { values: vec![2, 2] };
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"kind":"integers","values":[2,2]}"#);
    }

    #[test]
    fn infinite_residuals_become_null() {
        let c = Check::new("x", f64::INFINITY, 1e-9, false, 0, Some("here".into()));
        let mut r = MachineReport::new("verify", None, 0);
        r.check(&c);
        assert!(!r.pass);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(json["checks"][0]["residual"].is_null());
        assert!(json.get("wall_time_ms").is_none());
    }
}
