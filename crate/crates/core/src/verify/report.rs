//! Inequality reports: per-trial ratios, summary, refinement stability, and checks.

use serde::{Deserialize, Serialize};

use crate::verify::SuiteRun;

pub const TOOL_VERSION: &str = concat!("prodherz ", env!("CARGO_PKG_VERSION"));

/// Serde helpers writing non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(serde::de::Error::custom(format!("expected a number, got {t:?}"))),
            },
        }
    }

    pub mod opt {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] f64);
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub id: usize,
    pub label: String,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub ratio: f64,
    /// Plot coordinates, when the trial belongs to a curve (for example `γ` and a log-norm).
    #[serde(default, with = "real::opt", skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, with = "real::opt", skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

impl Trial {
    pub fn new(id: usize, label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Trial { id, label: label.into(), lhs, rhs, ratio: ratio(lhs, rhs), x: None, y: None }
    }

    pub fn at(mut self, x: f64, y: f64) -> Self {
        self.x = Some(x);
        self.y = Some(y);
        self
    }
}

/// `lhs / rhs` with `0 / 0 = 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(with = "real")]
    pub max: f64,
    #[serde(with = "real")]
    pub min: f64,
    #[serde(with = "real")]
    pub median: f64,
    pub count: usize,
}

impl Summary {
    pub fn of<'a>(ratios: impl IntoIterator<Item = &'a f64>) -> Summary {
        let mut v: Vec<f64> = ratios.into_iter().copied().collect();
        v.sort_by(f64::total_cmp);
        let count = v.len();
        if count == 0 {
            return Summary { max: f64::NAN, min: f64::NAN, median: f64::NAN, count };
        }
        let median = if count % 2 == 1 { v[count / 2] } else { 0.5 * (v[count / 2 - 1] + v[count / 2]) };
        Summary { max: v[count - 1], min: v[0], median, count }
    }
}

/// A statistic measured on the base grid and on the grid refined once (`s -> s + 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub statistic: String,
    #[serde(with = "real")]
    pub base: f64,
    #[serde(with = "real")]
    pub refined: f64,
    /// `|refined - base| / |base|`.
    #[serde(with = "real")]
    pub delta: f64,
}

impl Stability {
    pub fn new(statistic: impl Into<String>, base: f64, refined: f64) -> Self {
        let delta = if base == refined { 0.0 } else { (refined - base).abs() / base.abs() };
        Stability { statistic: statistic.into(), base, refined, delta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "real")]
    pub value: f64,
    pub comparison: Comparison,
    #[serde(with = "real")]
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, comparison: Comparison::AtMost, threshold, passed: value <= threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, comparison: Comparison::AtLeast, threshold, passed: value >= threshold }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The parameters violate a hypothesis of the claim; data is reported but never a pass.
    OutOfHypothesis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub claim: String,
    pub parameters: SuiteRun,
    pub trials: Vec<Trial>,
    pub summary: Summary,
    #[serde(default)]
    pub stability: Vec<Stability>,
    pub checks: Vec<Check>,
    pub status: Status,
    #[serde(default)]
    pub notes: Vec<String>,
    pub tool_version: String,
}

impl InequalityReport {
    /// Assembles the report; the status is `Pass` iff every check passed, unless a
    /// hypothesis was violated.
    pub fn new(
        parameters: SuiteRun,
        trials: Vec<Trial>,
        stability: Vec<Stability>,
        checks: Vec<Check>,
        violated: Vec<String>,
        mut notes: Vec<String>,
    ) -> Self {
        let summary = Summary::of(trials.iter().map(|t| &t.ratio).filter(|r| !r.is_nan()));
        let status = if !violated.is_empty() {
            notes.extend(violated.into_iter().map(|v| format!("hypothesis violated: {v}")));
            Status::OutOfHypothesis
        } else if checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        InequalityReport {
            claim: parameters.suite.name().to_string(),
            parameters,
            trials,
            summary,
            stability,
            checks,
            status,
            notes,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn trials_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Trial> + 'a {
        self.trials.iter().filter(move |t| t.label.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
