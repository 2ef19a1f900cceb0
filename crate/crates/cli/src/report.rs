use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// `max_deviation < tolerance`.
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        Self { name: name.into(), max_deviation, tolerance, pass: max_deviation < tolerance, detail: String::new() }
    }

    /// Integer equality, as a deviation `|found - expected|` with tolerance 0.5.
    pub fn count(name: impl Into<String>, found: u64, expected: u64) -> Self {
        Self::new(name, found.abs_diff(expected) as f64, 0.5).with_detail(format!("{found} (expected {expected})"))
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub dim: u32,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, dim: u32) -> Self {
        Self {
            command: command.into(),
            dim,
            checks: Vec::new(),
            findings: Vec::new(),
            metrics: BTreeMap::new(),
            wall_time_ms: 0,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// JSON without the wall time, so that it is reproducible.
    pub fn to_json_stable(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("wall_time_ms");
        serde_json::to_string_pretty(&v).expect("value serializes") + "\n"
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{} (d = {})", self.command, self.dim);
        let _ =
            writeln!(out, "{:width$}  {:>13}  {:>9}  {:6}  detail", "check", "max_deviation", "tolerance", "result");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:width$}  {:>13.3e}  {:>9.0e}  {:6}  {}",
                c.name,
                c.max_deviation,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" },
                c.detail
            );
        }
        if !self.metrics.is_empty() {
            let _ = writeln!(out, "metrics:");
            for (k, v) in &self.metrics {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        if !self.findings.is_empty() {
            let _ = writeln!(out, "findings:");
            for f in &self.findings {
                let _ = writeln!(out, "  - {f}");
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed in {} ms", self.checks.len(), self.wall_time_ms);
        out
    }
}
