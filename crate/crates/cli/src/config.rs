//! Run configuration: a TOML file with a grid, parameter blocks, and a suite list.
//!
//! ```toml
//! format = "json"
//!
//! [grid]
//! l_max = 3
//! s = 5
//!
//! [[params]]
//! alpha = 0.25
//! p = 2
//! q = 2
//! lambda = 0.5
//!
//! [[suites]]
//! suite = "maximal_bounds"
//! space = "herz"
//! strict = true
//! ```
//!
//! A suite entry may carry its own `grid` and `params` list, which replace the
//! top-level ones for that suite. Every other key is a suite option.

use std::fmt;
use std::path::{Path, PathBuf};

use prodherz::norms::ExponentParams;
use prodherz::verify::{Suite, SuiteRun};
use prodherz::{Error, GridSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    /// Unreadable file, malformed TOML, or a schema violation at a field path.
    Usage(String),
    /// A parameter block fails a predicate its suite requires.
    Predicate(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Usage(m) => write!(f, "usage error: {m}"),
            ConfigError::Predicate(m) => write!(f, "named-inequality error: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn usage(path: &str, msg: impl fmt::Display) -> ConfigError {
    ConfigError::Usage(format!("{path}: {msg}"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: Option<GridSpec>,
    #[serde(default)]
    params: Vec<ExponentParams>,
    #[serde(default)]
    suites: Vec<toml::Table>,
    out: Option<PathBuf>,
    format: Option<Format>,
    #[serde(default)]
    strict: bool,
    #[serde(default)]
    parallel: bool,
}

/// One suite on one parameter block.
#[derive(Clone, Debug)]
pub struct Job {
    pub suite_index: usize,
    pub params_index: usize,
    pub strict: bool,
    pub run: SuiteRun,
}

impl Job {
    /// `03-maximal_bounds-01`: suite position, suite name, parameter block position.
    pub fn stem(&self) -> String {
        format!("{:02}-{}-{:02}", self.suite_index, self.run.suite.name(), self.params_index)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub jobs: Vec<Job>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub parallel: bool,
}

fn at<T: DeserializeOwned>(path: &str, value: toml::Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let full = match (path.is_empty(), inner == ".") {
            (true, _) => inner,
            (false, true) => path.to_string(),
            (false, false) => format!("{path}.{inner}"),
        };
        usage(&full, e.into_inner())
    })
}

fn job_error(path: &str, e: Error) -> ConfigError {
    match e {
        Error::Predicate { .. } => ConfigError::Predicate(format!("{path}: {e}")),
        other => usage(path, other),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(&path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Parses and validates everything that can be checked without computing.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| usage("config", e.message().trim()))?;
        let raw: RawConfig = at("", toml::Value::Table(table))?;
        if raw.suites.is_empty() {
            return Err(usage("suites", "at least one suite is required"));
        }
        let mut jobs = Vec::new();
        for (i, mut entry) in raw.suites.into_iter().enumerate() {
            let path = format!("suites[{i}]");
            let grid = match entry.remove("grid") {
                Some(v) => at::<GridSpec>(&format!("{path}.grid"), v)?,
                None => raw.grid.ok_or_else(|| usage(&format!("{path}.grid"), "no grid given here or at top level"))?,
            };
            let params = match entry.remove("params") {
                Some(v) => at::<Vec<ExponentParams>>(&format!("{path}.params"), v)?,
                None => raw.params.clone(),
            };
            if params.is_empty() {
                return Err(usage(&format!("{path}.params"), "no parameter blocks given here or at top level"));
            }
            let strict = match entry.remove("strict") {
                Some(v) => at::<bool>(&format!("{path}.strict"), v)?,
                None => raw.strict,
            };
            let name = entry.get("suite").and_then(|v| v.as_str()).unwrap_or("?").to_string();
            let suite: Suite = at(&path, toml::Value::Table(entry))?;
            for (j, prm) in params.into_iter().enumerate() {
                let run = SuiteRun::new(grid, prm, suite.clone());
                run.validate().map_err(|e| job_error(&format!("{path} ({name}) on params[{j}]"), e))?;
                jobs.push(Job { suite_index: i, params_index: j, strict, run });
            }
        }
        Ok(RunConfig { jobs, out: raw.out, format: raw.format, parallel: raw.parallel })
    }
}
