//! Line-oriented audit trace of a run.
//!
//! Every mutation of run state appends one JSON object with a fixed field
//! order, so equal configurations produce byte-identical traces.

use num::bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

/// One mutation: which stage, which step, what object, state before/after.
#[derive(Serialize)]
pub struct TraceRec<'a> {
    pub stage: u32,
    pub step: &'a str,
    pub object: Value,
    pub before: Value,
    pub after: Value,
}

/// Collects trace records in order.
#[derive(Default)]
pub struct Trace {
    lines: Vec<String>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn rec(&mut self, stage: u32, step: &str, object: Value, before: Value, after: Value) {
        let r = TraceRec { stage, step, object, before, after };
        self.lines.push(serde_json::to_string(&r).expect("trace records serialize"));
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    /// One record per line, with a trailing newline when nonempty.
    pub fn to_jsonl(&self) -> String {
        let mut out = self.lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

/// Compact JSON form of a possibly enormous integer.
pub fn desc_big(v: &BigUint) -> Value {
    if v.bits() <= 128 {
        json!(v.to_string())
    } else {
        json!({ "bits": v.bits().to_string() })
    }
}
