//! Reports: one JSON object per line, then a plain summary table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use super::{RNG_ID, VERSION};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckTally {
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    /// The first failure, with enough data to reproduce it.
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub records: Vec<Value>,
    pub checks: BTreeMap<String, CheckTally>,
    /// Trials or stages abandoned because a cost cap was hit.
    pub caps_exceeded: Vec<Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            params: BTreeMap::new(),
            records: Vec::new(),
            checks: BTreeMap::new(),
            caps_exceeded: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("parameter serializes"));
        self
    }

    pub fn record(&mut self, value: Value) {
        self.records.push(value);
    }

    /// Tallies one evaluation of an asserted invariant; the witness is built only on failure.
    pub fn check(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> Value) {
        let tally = self.checks.entry(name.to_string()).or_default();
        if ok {
            tally.passed += 1;
        } else {
            tally.failed += 1;
            if tally.witness.is_none() {
                tally.witness = Some(witness());
            }
        }
    }

    pub fn skip(&mut self, name: &str) {
        self.checks.entry(name.to_string()).or_default().skipped += 1;
    }

    pub fn cap(&mut self, what: Value) {
        self.caps_exceeded.push(what);
    }

    pub fn failures(&self) -> u64 {
        self.checks.values().map(|c| c.failed).sum()
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failures() > 0 {
            1
        } else {
            0
        }
    }

    /// Merges another report's records, tallies and caps into this one.
    pub fn absorb(&mut self, other: Report) {
        self.records.extend(other.records);
        for (name, t) in other.checks {
            let mine = self.checks.entry(name).or_default();
            mine.passed += t.passed;
            mine.failed += t.failed;
            mine.skipped += t.skipped;
            if mine.witness.is_none() {
                mine.witness = t.witness;
            }
        }
        self.caps_exceeded.extend(other.caps_exceeded);
    }

    pub fn json_lines(&self) -> String {
        let mut out = String::new();
        let mut line = |v: Value| {
            out.push_str(&v.to_string());
            out.push('\n');
        };
        line(json!({
            "type": "header",
            "command": self.command,
            "params": self.params,
            "version": VERSION,
            "rng": RNG_ID,
        }));
        for r in &self.records {
            line(json!({"type": "record", "data": r}));
        }
        for c in &self.caps_exceeded {
            line(json!({"type": "cap_exceeded", "data": c}));
        }
        for (name, t) in &self.checks {
            line(json!({"type": "check", "name": name, "tally": t}));
        }
        line(json!({
            "type": "summary",
            "checks": self.checks.len(),
            "failures": self.failures(),
            "caps_exceeded": self.caps_exceeded.len(),
            "pass": self.failures() == 0,
        }));
        out
    }

    pub fn table(&self) -> String {
        let width = self.checks.keys().map(|k| k.len()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>8}  {:>8}  {:>8}", "check", "passed", "failed", "skipped");
        for (name, t) in &self.checks {
            let _ = writeln!(s, "{name:<width$}  {:>8}  {:>8}  {:>8}", t.passed, t.failed, t.skipped);
        }
        let _ = writeln!(
            s,
            "{}: {} failure(s), {} cap(s) exceeded",
            self.command,
            self.failures(),
            self.caps_exceeded.len()
        );
        s
    }
}
