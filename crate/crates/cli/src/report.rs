//! Structured run reports and their text rendering.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Measured but nothing was predicted.
    Info,
    /// Hypotheses do not hold for this input.
    Skipped,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Info => "INFO",
            Self::Skipped => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub name: String,
    pub verdict: Verdict,
    pub details: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Section {
    pub fn new(name: &str, verdict: Verdict) -> Self {
        Self {
            name: name.to_string(),
            verdict,
            details: Map::new(),
            witnesses: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("report values serialize"),
        );
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witnesses.push(w.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// One instance of a grid sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<usize>,
    /// Only checks whose hypotheses hold appear here.
    pub checks: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub cap_exceeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl GridRow {
    pub fn passed(&self) -> bool {
        self.failed.is_empty() && self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub input: String,
    pub seed: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    pub sections: Vec<Section>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<GridRow>,
    /// Primary text output of `build` and `tower`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl Report {
    pub fn new(command: &str, input: String, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input,
            seed,
            verdict: Verdict::Pass,
            first_failure: None,
            sections: Vec::new(),
            rows: Vec::new(),
            output: None,
        }
    }

    pub fn push(&mut self, s: Section) {
        if !s.passed() && self.first_failure.is_none() {
            self.first_failure = Some(s.name.clone());
            self.verdict = Verdict::Fail;
        }
        self.sections.push(s);
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// 0 on success, 3 if any grid instance hit the enumeration cap, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else if self.rows.iter().any(|r| r.cap_exceeded) {
            3
        } else {
            1
        }
    }

    pub fn without_timings(mut self) -> Self {
        for s in &mut self.sections {
            s.elapsed_ms = None;
        }
        for r in &mut self.rows {
            r.elapsed_ms = None;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable form. Commands with a primary output print only that.
    pub fn to_text(&self) -> String {
        if let Some(o) = &self.output {
            return o.clone();
        }
        let mut out = String::new();
        for s in &self.sections {
            let _ = write!(out, "[{}] {}", s.verdict.tag(), s.name);
            if let Some(ms) = s.elapsed_ms {
                let _ = write!(out, " ({ms} ms)");
            }
            out.push('\n');
            for (k, v) in &s.details {
                let _ = writeln!(out, "    {k}: {}", render_value(v));
            }
            for w in &s.witnesses {
                let _ = writeln!(out, "    > {w}");
            }
        }
        for r in &self.rows {
            let _ = write!(out, "#{:<3} ", r.index);
            if let Some(n) = &r.name {
                let _ = write!(out, "{n} ");
            }
            let _ = write!(out, "size={}", r.size);
            if let Some(o) = r.group_order {
                let _ = write!(out, " order={o}");
            }
            if let Some(e) = &r.error {
                let _ = write!(out, " ERROR {e}");
            } else if r.passed() {
                out.push_str(" PASS");
            } else {
                let _ = write!(out, " FAIL {}", r.failed.join(","));
            }
            out.push('\n');
        }
        match &self.first_failure {
            None => out.push_str("verdict: PASS\n"),
            Some(f) => {
                let _ = writeln!(out, "verdict: FAIL (first failing section: {f})");
            }
        }
        out
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_failure_is_recorded_once() {
        let mut r = Report::new("check", "x".into(), 0);
        r.push(Section::new("a", Verdict::Pass));
        r.push(Section::new("b", Verdict::Info));
        r.push(Section::new("c", Verdict::Fail));
        r.push(Section::new("d", Verdict::Fail));
        assert_eq!(r.first_failure.as_deref(), Some("c"));
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_text().ends_with("verdict: FAIL (first failing section: c)\n"));
    }

    #[test]
    fn timings_are_stripped() {
        let mut r = Report::new("check", "x".into(), 0);
        let mut s = Section::new("a", Verdict::Pass).detail("n", 3);
        s.elapsed_ms = Some(12);
        r.push(s);
        assert!(r.to_json().contains("elapsed_ms"));
        let stripped = r.without_timings();
        assert!(!stripped.to_json().contains("elapsed_ms"));
        assert!(stripped.to_json().contains("\"schema_version\": 1"));
    }
}
