//! Verification reports and their JSON / text serializations.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
    NothingRun,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Error => "error",
            Self::NothingRun => "nothing-run",
        }
    }

    /// Worst of a set of verdicts; `NothingRun` for an empty set.
    pub fn combine(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
        vs.into_iter()
            .fold(Self::NothingRun, |acc, v| match (acc, v) {
                (Self::Error, _) | (_, Self::Error) => Self::Error,
                (Self::Fail, _) | (_, Self::Fail) => Self::Fail,
                (_, Self::Pass) | (Self::Pass, _) => Self::Pass,
                _ => Self::NothingRun,
            })
    }
}

/// How the residual is compared to the tolerance. Negative controls use
/// `AtLeast`: the deliberately broken input must be rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity being tested, written out.
    pub relation: String,
    pub samples_used: usize,
    /// `None` when the check errored or produced a non-finite residual.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn judge(
        name: impl Into<String>,
        relation: impl Into<String>,
        samples_used: usize,
        residual: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let finite = residual.is_finite();
        let ok = finite
            && match comparison {
                Comparison::AtMost => residual <= tolerance,
                Comparison::AtLeast => residual >= tolerance,
            };
        Self {
            name: name.into(),
            relation: relation.into(),
            samples_used,
            max_residual: finite.then_some(residual),
            tolerance,
            comparison,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note: (!finite).then(|| "non-finite residual".to_string()),
        }
    }

    pub fn error(
        name: impl Into<String>,
        relation: impl Into<String>,
        tolerance: f64,
        comparison: Comparison,
        message: String,
    ) -> Self {
        Self {
            name: name.into(),
            relation: relation.into(),
            samples_used: 0,
            max_residual: None,
            tolerance,
            comparison,
            verdict: Verdict::Error,
            note: Some(message),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub verdict: Verdict,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn new(name: impl Into<String>, checks: Vec<CheckRecord>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::combine(checks.iter().map(|c| c.verdict)),
            checks,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
    pub workers: usize,
}

impl Environment {
    pub fn current(workers: usize) -> Self {
        Self {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            workers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub verdict: Verdict,
    pub environment: Environment,
    pub config: RunConfig,
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn new(config: RunConfig, environment: Environment, suites: Vec<SuiteReport>) -> Self {
        Self {
            schema: SCHEMA_VERSION.into(),
            verdict: Verdict::combine(suites.iter().map(|s| s.verdict)),
            environment,
            config,
            suites,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn checks(&self) -> impl Iterator<Item = (&str, &CheckRecord)> {
        self.suites
            .iter()
            .flat_map(|s| s.checks.iter().map(move |c| (s.name.as_str(), c)))
    }

    pub fn find(&self, suite: &str, check: &str) -> Option<&CheckRecord> {
        self.checks()
            .find(|(s, c)| *s == suite && c.name == check)
            .map(|x| x.1)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn emit_report(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(report),
    }
}

fn text(r: &VerificationReport) -> String {
    let mut out = String::new();
    for s in &r.suites {
        for c in &s.checks {
            let res = c
                .max_residual
                .map_or("-".to_string(), |x| format!("{x:.3e}"));
            let op = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            let _ = write!(
                out,
                "{:<5} {}.{}  [{}]  residual {} {} {:.1e}  samples {}",
                c.verdict.as_str().to_uppercase(),
                s.name,
                c.name,
                c.relation,
                res,
                op,
                c.tolerance,
                c.samples_used
            );
            if let Some(n) = &c.note {
                let _ = write!(out, "  ({n})");
            }
            out.push('\n');
        }
    }
    let total = r.checks().count();
    let passed = r
        .checks()
        .filter(|(_, c)| c.verdict == Verdict::Pass)
        .count();
    let _ = writeln!(
        out,
        "overall: {} ({passed}/{total} checks passed)",
        r.verdict.as_str()
    );
    out
}
