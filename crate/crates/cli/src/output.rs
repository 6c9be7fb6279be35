//! Query result rendering: one structured JSON record per query in machine
//! mode, readable text in human mode. Machine records are deterministic for
//! fixed inputs, seed and tolerance configuration.

use serde_json::{json, Value};

use desq_core::hermitian::HermitianOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

/// Exit codes: 0 success / affirmative, 1 definite negative answer,
/// 2 boundary, 3 input error, 4 solver stall.
pub struct QueryResult {
    pub record: Value,
    pub human: String,
    pub exit_code: i32,
}

impl QueryResult {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => self.record.to_string(),
            Format::Human => self.human.clone(),
        }
    }
}

/// Row-major [re, im] rendering of a Hermitian matrix, entries snapped to
/// zero below the reconstruction tolerance for stable output.
pub fn matrix_json(op: &HermitianOperator) -> Value {
    let d = op.dim();
    let mut rows = Vec::with_capacity(d);
    for r in 0..d {
        let mut row = Vec::with_capacity(d);
        for c in 0..d {
            let z = op.entry(r, c);
            let re = if z.re.abs() < 1e-14 { 0.0 } else { z.re };
            let im = if z.im.abs() < 1e-14 { 0.0 } else { z.im };
            row.push(json!([re, im]));
        }
        rows.push(Value::Array(row));
    }
    Value::Array(rows)
}

pub fn matrix_human(op: &HermitianOperator) -> String {
    let d = op.dim();
    let mut out = String::new();
    for r in 0..d {
        out.push_str("  [");
        for c in 0..d {
            let z = op.entry(r, c);
            if c > 0 {
                out.push_str(", ");
            }
            if z.im.abs() < 1e-12 {
                out.push_str(&format!("{:.6}", z.re));
            } else {
                out.push_str(&format!("{:.6}{:+.6}i", z.re, z.im));
            }
        }
        out.push_str("]\n");
    }
    out
}
