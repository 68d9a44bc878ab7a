//! The response document and its two renderings.
//!
//! Floating-point numbers are written with 17 significant digits in
//! scientific notation (`1.6666666666666667e0`), which round-trips every
//! `f64`. Non-finite values never reach the output; they become `null`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

pub const SCHEMA_ID: &str = "tmoment.response.v1";

/// Published schema of [`Response`].
pub const SCHEMA: &str = include_str!("../schema/response.v1.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OrderOut {
    Int(u32),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Response {
    pub schema: &'static str,
    pub command: &'static str,
    pub target: &'static str,
    pub kind: &'static str,
    pub k: Vec<OrderOut>,
    pub dim: usize,
    pub value: Option<f64>,
    pub defined: bool,
    pub reason: String,
    pub formula: &'static str,
    pub mode: &'static str,
    pub diagnostics: DiagnosticsOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DiagnosticsOut {
    pub series_terms: Option<usize>,
    pub series_error: Option<f64>,
    pub quad_error: Option<f64>,
    pub evaluations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOut {
    /// `quadrature` or `monte-carlo`.
    pub method: &'static str,
    pub value: Option<f64>,
    /// Estimated absolute error (quadrature) or standard error (Monte Carlo).
    pub error: Option<f64>,
    pub evaluations: Option<usize>,
    pub n_samples: Option<usize>,
    pub accepted: Option<usize>,
    pub seed: Option<u64>,
    pub heavy_tail_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub formula_value: Option<f64>,
    pub oracle_value: Option<f64>,
    pub oracle_error: Option<f64>,
    pub difference: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// `oracle / formula`.
    pub ratio: Option<f64>,
    pub note: Option<String>,
}

/// `Some(x)` for finite `x`.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Compact layout (the trait defaults) with 17-digit floats.
struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json(r: &Response) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    r.serialize(&mut ser).expect("response serializes");
    String::from_utf8(out).expect("utf-8 json")
}

/// One `key: value` line per leaf, nested keys joined with dots.
pub fn to_plain(r: &Response) -> String {
    let v = serde_json::to_value(r).expect("response serializes");
    let mut lines = Vec::new();
    flatten("", &v, &mut lines);
    lines.join("\n")
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => sig17(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (key, child) in map {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten(&path, child, out);
            }
        }
        Value::Array(items) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push(format!("{prefix}: {}", joined.join(",")));
        }
        leaf => out.push(format!("{prefix}: {}", scalar(leaf))),
    }
}
