//! Run-report assembly and rendering.
//!
//! A report carries the command name, a digest of the raw input, the
//! command-specific outputs, and a table of named checks. JSON rendering is
//! canonical (sorted keys, full-precision floats) so identical inputs yield
//! byte-identical reports; check names are stable across versions.

use clap::ValueEnum;
use num_complex::Complex64;
use serde_json::{json, Value};
use specband_core::direct::{CheckResult, NecessaryConditionRow};

use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

impl From<&CheckResult> for CheckRow {
    fn from(c: &CheckResult) -> Self {
        Self::new(c.name, c.pass, c.detail.clone())
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: &'static str,
    pub input_digest: String,
    pub outputs: Value,
    pub checks: Vec<CheckRow>,
    pub pass: bool,
}

impl RunReport {
    pub fn to_value(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "detail": c.detail, "name": c.name, "pass": c.pass }))
            .collect();
        json!({
            "checks": checks,
            "command": self.command,
            "input_digest": self.input_digest,
            "outputs": self.outputs,
            "pass": self.pass,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = io::to_canonical_json(&self.to_value());
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = String::new();
                s.push_str(&format!("command: {}\n", self.command));
                s.push_str(&format!("input: sha256:{}\n", self.input_digest));
                for c in &self.checks {
                    s.push_str(&format!(
                        "check {}: {}  {}\n",
                        c.name,
                        if c.pass { "pass" } else { "FAIL" },
                        c.detail
                    ));
                }
                s.push_str(&format!(
                    "outputs: {}\n",
                    io::to_canonical_json(&self.outputs)
                ));
                s.push_str(&format!(
                    "result: {}\n",
                    if self.pass { "pass" } else { "fail" }
                ));
                s
            }
        }
    }
}

pub fn complex_value(z: Complex64) -> Value {
    json!({ "im": z.im, "re": z.re })
}

pub fn complex_vec(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex_value(z)).collect())
}

pub fn condition_rows_value(rows: &[NecessaryConditionRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "char_value": r.char_value,
                    "k": r.k,
                    "pass": r.pass,
                    "sign_equality": r.sign_equality,
                    "sign_margin": r.sign_margin,
                    "window_equality": r.window_equality,
                    "window_margin": r.window_margin,
                })
            })
            .collect(),
    )
}
