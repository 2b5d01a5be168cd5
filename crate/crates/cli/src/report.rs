use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use srcf_core::CfError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
    Indeterminate,
}

/// The document every command prints.
#[derive(Debug, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    /// Process exit code; not serialized.
    #[serde(skip)]
    pub exit_code: u8,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl CommandResult {
    pub fn ok(payload: Value) -> Self {
        CommandResult {
            status: Status::Ok,
            payload,
            diagnostics: Vec::new(),
            exit_code: 0,
            table: None,
        }
    }

    /// A certified check ran and failed.
    pub fn failed(payload: Value) -> Self {
        CommandResult {
            status: Status::Error,
            exit_code: 2,
            ..CommandResult::ok(payload)
        }
    }

    pub fn indeterminate(payload: Value) -> Self {
        CommandResult {
            status: Status::Indeterminate,
            exit_code: 3,
            ..CommandResult::ok(payload)
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        let message = message.into();
        CommandResult {
            status: Status::Error,
            payload: serde_json::json!({ "error": "usage", "message": message }),
            diagnostics: vec![message],
            exit_code: 1,
            table: None,
        }
    }

    pub fn from_error(e: &CfError) -> Self {
        let (kind, code) = classify(e);
        let mut payload = serde_json::json!({ "error": kind, "message": e.to_string() });
        if let CfError::MalformedSpec { violations } = e {
            payload["violations"] = violations
                .iter()
                .map(|v| serde_json::json!({ "index": v.index, "rule": format!("{:?}", v.rule) }))
                .collect();
        }
        CommandResult {
            status: if code == 3 { Status::Indeterminate } else { Status::Error },
            payload,
            diagnostics: vec![e.to_string()],
            exit_code: code,
            table: None,
        }
    }

    pub fn note(mut self, d: impl Into<String>) -> Self {
        self.diagnostics.push(d.into());
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn render(&self, pretty: bool) -> String {
        if !pretty {
            return serde_json::to_string(self).expect("serializable result") + "\n";
        }
        let mut out = String::new();
        let status = match self.status {
            Status::Ok => "ok",
            Status::Error => "error",
            Status::Indeterminate => "indeterminate",
        };
        let _ = writeln!(out, "status: {status}");
        if let Value::Object(map) = &self.payload {
            for (k, v) in map {
                if let Some(s) = scalar(v) {
                    let _ = writeln!(out, "{k}: {s}");
                } else if let Value::Object(inner) = v {
                    for (k2, v2) in inner {
                        if let Some(s) = scalar(v2) {
                            let _ = writeln!(out, "{k}.{k2}: {s}");
                        }
                    }
                }
            }
        }
        if let Some(t) = &self.table {
            out.push('\n');
            out.push_str(&t.render());
        }
        if !self.diagnostics.is_empty() {
            out.push('\n');
            for d in &self.diagnostics {
                let _ = writeln!(out, "note: {d}");
            }
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Error kind and exit code: 1 for bad input, 2 for a failed certified
/// check, 3 when exact arithmetic could not decide.
fn classify(e: &CfError) -> (&'static str, u8) {
    match e {
        CfError::MalformedSpec { .. } => ("malformed_spec", 1),
        CfError::Parse(_) => ("parse", 1),
        CfError::UnknownFamily(_) => ("unknown_family", 1),
        CfError::BadParams(_) => ("bad_params", 1),
        CfError::IndexOutOfRange { .. } => ("index_out_of_range", 1),
        CfError::Precondition(_) => ("precondition", 1),
        CfError::NotNcf(_) => ("not_ncf", 1),
        CfError::NoLargeTerm => ("no_large_term", 1),
        CfError::NotRcf(_) => ("not_rcf", 1),
        CfError::NotLcf(_) => ("not_lcf", 1),
        CfError::IncompleteBlock(_) => ("incomplete_block", 1),
        CfError::TruncationEmpty(_) => ("truncation_empty", 1),
        CfError::DegenerateQ(_) => ("degenerate_q", 1),
        CfError::BadTarget(_) => ("bad_target", 1),
        CfError::BadPeriod(_) => ("bad_period", 1),
        CfError::InvariantBreach { .. } => ("invariant_breach", 2),
        CfError::DivisibilityBreach(_) => ("divisibility_breach", 2),
        CfError::ConditionNotVerified(_) => ("condition_not_verified", 2),
        CfError::EnclosureFailed { .. } => ("enclosure_failed", 3),
    }
}

/// Fixed-width text table for `--pretty`.
#[derive(Debug)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.headers);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&line(&rule));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}
