//! Report files: full JSON reports, flat CSV trial tables, and the run index.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use prodherz::verify::report::{InequalityReport, Status, TOOL_VERSION};
use serde::Serialize;

use crate::config::{Format, Job};

pub const CSV_HEADER: [&str; 10] =
    ["claim", "trial", "lhs", "rhs", "ratio", "x", "y", "label", "params", "tool_version"];

fn real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        v.to_string()
    }
}

pub fn render_csv(report: &InequalityReport) -> Result<Vec<u8>> {
    let params = serde_json::to_string(&report.parameters)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for t in &report.trials {
        w.write_record([
            report.claim.clone(),
            t.id.to_string(),
            real(t.lhs),
            real(t.rhs),
            real(t.ratio),
            t.x.map(real).unwrap_or_default(),
            t.y.map(real).unwrap_or_default(),
            t.label.clone(),
            params.clone(),
            report.tool_version.clone(),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn render(report: &InequalityReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => Ok(format!("{}\n", report.to_json()).into_bytes()),
        Format::Csv => render_csv(report),
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    f.write_all(bytes).with_context(|| format!("cannot write {}", path.display()))
}

/// One line of the index per job.
#[derive(Debug, Serialize)]
pub struct Entry {
    pub suite: String,
    pub suite_index: usize,
    pub params_index: usize,
    pub file: Option<String>,
    /// `pass`, `fail`, `out-of-hypothesis`, or `error`.
    pub status: String,
    pub strict: bool,
    /// Whether this job counts against the exit status.
    pub ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failed_checks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Entry {
    pub fn from_report(job: &Job, file: &str, r: &InequalityReport) -> Self {
        let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let ok = match r.status {
            Status::Pass => true,
            Status::OutOfHypothesis => !job.strict,
            Status::Fail => false,
        };
        Entry {
            suite: r.claim.clone(),
            suite_index: job.suite_index,
            params_index: job.params_index,
            file: Some(file.to_string()),
            status,
            strict: job.strict,
            ok,
            failed_checks: r.failed_checks().map(|c| c.name.clone()).collect(),
            error: None,
        }
    }

    pub fn from_error(job: &Job, e: &anyhow::Error) -> Self {
        Entry {
            suite: job.run.suite.name().to_string(),
            suite_index: job.suite_index,
            params_index: job.params_index,
            file: None,
            status: "error".into(),
            strict: job.strict,
            ok: false,
            failed_checks: Vec::new(),
            error: Some(format!("{e:#}")),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Index {
    pub tool_version: &'static str,
    pub format: Format,
    pub all_ok: bool,
    pub entries: Vec<Entry>,
}

impl Index {
    pub fn new(format: Format, entries: Vec<Entry>) -> Self {
        Index { tool_version: TOOL_VERSION, format, all_ok: entries.iter().all(|e| e.ok), entries }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("index.json");
        write_file(&path, format!("{}\n", serde_json::to_string_pretty(self)?).as_bytes())?;
        Ok(path)
    }
}
