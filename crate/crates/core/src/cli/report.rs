//! Report assembly: a JSON body plus a line-oriented text rendering, both
//! prefixed with the reproducibility header.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::kernel::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Informational command, nothing checked.
    Ok,
    Pass,
    Fail,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "OK",
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }

    pub fn from_check(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Command output before the header is attached.
#[derive(Debug, Clone)]
pub struct Report {
    pub status: Status,
    pub result: Map<String, Value>,
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(status: Status) -> Self {
        Self {
            status,
            result: Map::new(),
            lines: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.result.insert(key.to_string(), value.into());
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn fail(&mut self) {
        self.status = Status::Fail;
    }
}

/// Values echoed into every report.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: String,
    pub seed: u64,
    pub tol: f64,
    /// The tolerance as typed on the command line.
    pub tol_text: String,
    pub input_sha256: String,
}

pub fn render_json(header: &Header, report: &Report) -> String {
    let doc = json!({
        "tool": "ssrlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": header.command,
        "seed": header.seed,
        "tol": header.tol,
        "input_sha256": header.input_sha256,
        "status": report.status.label(),
        "result": Value::Object(report.result.clone()),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn render_text(header: &Header, report: &Report) -> String {
    let mut out = format!(
        "ssrlab {} {}\nseed: {}\ntol: {}\ninput sha256: {}\nstatus: {}\n",
        env!("CARGO_PKG_VERSION"),
        header.command,
        header.seed,
        header.tol_text,
        header.input_sha256,
        report.status.label()
    );
    for l in &report.lines {
        out.push_str(l);
        out.push('\n');
    }
    out
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

/// Same layout as the input schema.
pub fn matrix(m: &ComplexMatrix) -> Value {
    let data: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| complex(m[(i, j)])).collect()))
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "data": data})
}

/// `a+bi` with shortest round-trip floats, for text reports.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Rounds values within `1e-12` of an integer or zero, so text output does
/// not show rounding noise.
pub fn clean(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-12 {
        r + 0.0
    } else {
        x
    }
}

pub fn clean_complex(z: Complex64) -> Complex64 {
    Complex64::new(clean(z.re), clean(z.im))
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn join_usize(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}
