use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: u64,
    pub input: Value,
    pub output: Value,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Case {
    pub fn ok(id: u64, input: Value, output: Value) -> Self {
        Case {
            id,
            input,
            output,
            pass: true,
            counterexample: None,
            error: None,
        }
    }

    pub fn failed(id: u64, input: Value, error: String) -> Self {
        Case {
            id,
            input,
            output: Value::Null,
            pass: false,
            counterexample: None,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub v: u32,
    pub command: Value,
    pub cases: Vec<Case>,
    pub totals: Totals,
    /// Only present when timing was requested; reports are otherwise
    /// byte-identical across runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl Report {
    pub fn new(command: Value, cases: Vec<Case>) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        Report {
            v: REPORT_VERSION,
            command,
            totals: Totals {
                cases: cases.len(),
                passed,
                failed: cases.len() - passed,
            },
            cases,
            wall_time_ms: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.totals.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.cases {
            let status = if c.pass { "pass" } else { "FAIL" };
            let _ = write!(s, "{status} case {}", c.id);
            if let Some(e) = &c.error {
                let _ = write!(s, ": {e}");
            } else if !c.output.is_null() {
                let _ = write!(s, ": {}", c.output);
            }
            s.push('\n');
        }
        let _ = write!(
            s,
            "{}/{} passed, {} failed",
            self.totals.passed, self.totals.cases, self.totals.failed
        );
        if let Some(ms) = self.wall_time_ms {
            let _ = write!(s, " in {ms} ms");
        }
        s.push('\n');
        s
    }
}
