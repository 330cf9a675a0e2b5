//! Deterministic serialization: every float is written with 17 significant
//! digits, rows keep grid order, and data files carry no timestamps.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Number, Value};

use crate::config::Format;
use crate::error::{CliError, CliResult};

/// One table entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // only reachable through a library bug; keep the file parseable
        format!("{x}")
    }
}

/// The same digits as a JSON number (`null` when not finite).
pub fn json_float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let n: Number = serde_json::from_str(&format_float(x)).expect("formatted float is a valid JSON number");
    Value::Number(n)
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => json_float(*x),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text)).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Result of a task: a table plus task-specific metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub metadata: Map<String, Value>,
    /// `false` when a diagnostic suite failed; the data are still written.
    pub passed: bool,
}

/// Bytes of the data file for a successful run.
pub fn render(task: &str, report: &Report, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("task".into(), json!(task));
            doc.insert("status".into(), json!(if report.passed { "ok" } else { "failed" }));
            if let Value::Object(t) = report.table.to_json() {
                doc.extend(t);
            }
            pretty(&Value::Object(doc))
        }
    }
}

/// Bytes of the JSON error report.
pub fn render_error(task: &str, err: &CliError) -> CliResult<Vec<u8>> {
    pretty(&json!({
        "task": task,
        "status": "error",
        "error": { "code": err.code(), "exit_code": err.exit_code(), "message": err.to_string() },
    }))
}

pub fn pretty(v: &Value) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}
