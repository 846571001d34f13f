//! Versioned machine-readable reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA: &str = "kcalc/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Established by the computation in this report.
    Computed,
    /// Taken from the literature; nothing here checks it.
    CitedNotComputed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub status: Status,
    pub backing: Vec<String>,
}

impl Verdict {
    pub fn computed(claim: impl Into<String>, backing: &[&str]) -> Self {
        Verdict {
            claim: claim.into(),
            status: Status::Computed,
            backing: backing.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn cited(claim: impl Into<String>, backing: &[&str]) -> Self {
        Verdict {
            claim: claim.into(),
            status: Status::CitedNotComputed,
            backing: backing.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: Vec<String>,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub verdicts: Vec<Verdict>,
    /// Wall-clock time; the only field that varies between identical runs.
    pub elapsed_us: u64,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command,
            inputs: Map::new(),
            results: Map::new(),
            verdicts: Vec::new(),
            elapsed_us: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.results.insert(key.to_string(), to_value(value));
        self
    }

    pub fn verdict(&mut self, v: Verdict) -> &mut Self {
        self.verdicts.push(v);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} ({})", self.command.join(" "), self.schema);
        let mut rows = Vec::new();
        for (k, v) in &self.inputs {
            flatten(&format!("input.{k}"), v, &mut rows);
        }
        for (k, v) in &self.results {
            flatten(k, v, &mut rows);
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0).min(48);
        for (k, v) in rows {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        for v in &self.verdicts {
            let tag = match v.status {
                Status::Computed => "computed",
                Status::CitedNotComputed => "cited, not computed",
            };
            let _ = writeln!(out, "verdict: {} [{tag}; {}]", v.claim, v.backing.join("; "));
        }
        let _ = writeln!(out, "elapsed: {} us", self.elapsed_us);
        out
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values are plain JSON")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        rows.push((prefix.to_string(), s));
        return;
    }
    match v {
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            rows.push((prefix.to_string(), parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, rows);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                flatten(&format!("{prefix}.{k}"), item, rows);
            }
        }
        _ => unreachable!(),
    }
}
