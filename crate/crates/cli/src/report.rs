use std::fmt::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Config;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex([f64; 2]),
    Count(usize),
    Lines(Vec<String>),
}

impl From<Complex64> for Value {
    fn from(z: Complex64) -> Self {
        Value::Complex([z.re, z.im])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: Value,
}

/// Comparison of a computed value with an independent reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Relative error, falling back to absolute error for a zero reference.
    pub fn relative(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let error = (value - reference).abs() / if reference == 0.0 { 1.0 } else { reference.abs() };
        Check { name: name.into(), value, reference, error, tolerance, pass: error <= tolerance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub mode: &'static str,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub input: Config,
    pub results: Vec<Entry>,
    pub checks: Vec<Check>,
    pub status: &'static str,
}

impl Report {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Aligned plain-text summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode       {}", self.mode);
        let _ = writeln!(out, "tolerance  {:e}", self.tolerance);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed       {seed}");
        }
        let width = self.results.iter().map(|e| e.name.len()).max().unwrap_or(0);
        if !self.results.is_empty() {
            out.push('\n');
        }
        for e in &self.results {
            match &e.value {
                Value::Real(x) => {
                    let _ = writeln!(out, "{:<width$}  {x:>24.16e}", e.name);
                }
                Value::Complex([re, im]) => {
                    let _ = writeln!(out, "{:<width$}  {re:>24.16e} {im:+.3e}i", e.name);
                }
                Value::Count(n) => {
                    let _ = writeln!(out, "{:<width$}  {n:>24}", e.name);
                }
                Value::Lines(lines) => {
                    let _ = writeln!(out, "{}:", e.name);
                    for l in lines {
                        let _ = writeln!(out, "    {l}");
                    }
                }
            }
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
            let _ =
                writeln!(out, "\n{:<width$}  {:>24}  {:>24}  {:>9}  result", "check", "value", "reference", "error");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>24.16e}  {:>24.16e}  {:>9.2e}  {}",
                    c.name,
                    c.value,
                    c.reference,
                    c.error,
                    if c.pass { "pass" } else { "FAIL" }
                );
            }
        }
        let _ =
            writeln!(out, "\nstatus     {} ({} of {} checks failed)", self.status, self.failed(), self.checks.len());
        out
    }
}
