//! Check reports with canonical JSON output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};

/// A measured quantity and the bound it is held to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// Residual that must stay strictly below the threshold.
    Residual { value: f64, threshold: f64 },
    /// Integer that must equal the expected value.
    Count { value: i64, expected: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measure: Measure,
    pub pass: bool,
}

impl Check {
    pub fn residual(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        let pass = value.is_finite() && value < threshold;
        Check { name: name.into(), measure: Measure::Residual { value, threshold }, pass }
    }

    pub fn count(name: impl Into<String>, value: i64, expected: i64) -> Self {
        Check { name: name.into(), measure: Measure::Count { value, expected }, pass: value == expected }
    }

    fn to_value(&self) -> Value {
        let (value, threshold) = match self.measure {
            Measure::Residual { value, threshold } => (float(value), float(threshold)),
            Measure::Count { value, expected } => (Value::from(value), Value::from(expected)),
        };
        let mut m = serde_json::Map::new();
        m.insert("name".into(), Value::from(self.name.clone()));
        m.insert("value".into(), value);
        m.insert("threshold".into(), threshold);
        m.insert("pass".into(), Value::from(self.pass));
        Value::Object(m)
    }
}

/// JSON number for a float; non-finite values become `null`.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

/// Checks plus command-specific payload sections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub sections: BTreeMap<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn section(&mut self, key: &str, value: Value) {
        self.sections.insert(key.to_string(), value);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_value(&self) -> Value {
        let mut m = serde_json::Map::new();
        for (k, v) in &self.sections {
            m.insert(k.clone(), v.clone());
        }
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_value).collect()));
        m.insert("pass".into(), Value::from(self.pass()));
        Value::Object(m)
    }

    /// Canonical JSON text, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = canonical_json(&self.to_value());
        s.push('\n');
        s
    }

    /// Aligned plain-text table of the checks.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:width$}  {:>12}  {:>12}  result", "check", "value", "bound");
        for c in &self.checks {
            let (v, t) = match c.measure {
                Measure::Residual { value, threshold } => (format!("{value:.3e}"), format!("< {threshold:.0e}")),
                Measure::Count { value, expected } => (value.to_string(), format!("= {expected}")),
            };
            let _ = writeln!(out, "{:width$}  {v:>12}  {t:>12}  {}", c.name, if c.pass { "pass" } else { "FAIL" });
        }
        let _ = writeln!(out, "overall: {}", if self.pass() { "pass" } else { "FAIL" });
        out
    }
}

/// Writes the canonical JSON of `r` to `path`.
pub fn emit_report(r: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, r.to_json()).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Compact JSON with sorted keys and floats in `{:.16e}` form.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64 number");
                let _ = write!(out, "{x:.16e}");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(out, &map[key]);
            }
            out.push('}');
        }
    }
}
