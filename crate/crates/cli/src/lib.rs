//! Front end for the hybrid-plane library: validated TOML configs,
//! parallel sweeps with order-stable output, and diagnostics reports.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod output;
pub mod tasks;

use serde_json::{json, Map, Value};

pub use config::{parse_config, Format, RunConfig, Task};
pub use error::{CliError, CliResult};
use output::{pretty, render, render_error, Report};

pub const TOOL_NAME: &str = "hybrid-plane";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub threads: usize,
    /// Only consumed by the diagnostics suites.
    pub seed: u64,
    pub format: Format,
}

/// What a run produced: the data file, the metadata sidecar, and the exit
/// status (0 iff nothing failed).
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    /// `None` when the run failed and the format is CSV.
    pub data: Option<Vec<u8>>,
    pub meta: Vec<u8>,
    pub exit_code: i32,
    pub error: Option<CliError>,
}

pub fn run(cfg: &RunConfig, opts: &RunOptions) -> CliResult<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    tasks::run_task(cfg, &pool, opts.seed)
}

pub fn execute(cfg: &RunConfig, opts: &RunOptions) -> Artifacts {
    let task = cfg.task.name();
    let outcome = run(cfg, opts).and_then(|report| {
        let data = render(task, &report, opts.format)?;
        Ok((report, data))
    });
    let mut meta = Map::new();
    meta.insert("tool".into(), json!(TOOL_NAME));
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta.insert("task".into(), json!(task));
    meta.insert("format".into(), json!(match opts.format {
        Format::Csv => "csv",
        Format::Json => "json",
    }));
    meta.insert("float_format".into(), json!("17 significant digits"));
    meta.insert("config".into(), serde_json::to_value(&cfg.document).unwrap_or(Value::Null));
    match outcome {
        Ok((report, data)) => {
            let failure = (!report.passed).then(|| CliError::DiagnosticsFailed(failed_suites(&report)));
            meta.insert("status".into(), json!(if failure.is_none() { "ok" } else { "failed" }));
            meta.insert("columns".into(), json!(report.table.columns));
            meta.insert("rows".into(), json!(report.table.rows.len()));
            meta.insert("metadata".into(), Value::Object(report.metadata));
            if let Some(e) = &failure {
                meta.insert("error".into(), error_json(e));
            }
            Artifacts {
                data: Some(data),
                meta: pretty(&Value::Object(meta)).expect("metadata serializes"),
                exit_code: failure.as_ref().map_or(0, CliError::exit_code),
                error: failure,
            }
        }
        Err(e) => {
            meta.insert("status".into(), json!("error"));
            meta.insert("error".into(), error_json(&e));
            let data = match opts.format {
                Format::Json => render_error(task, &e).ok(),
                Format::Csv => None,
            };
            Artifacts {
                data,
                meta: pretty(&Value::Object(meta)).expect("metadata serializes"),
                exit_code: e.exit_code(),
                error: Some(e),
            }
        }
    }
}

fn failed_suites(report: &Report) -> usize {
    report.metadata.get("suites_failed").and_then(Value::as_u64).unwrap_or(1) as usize
}

fn error_json(e: &CliError) -> Value {
    json!({ "code": e.code(), "exit_code": e.exit_code(), "message": e.to_string() })
}
