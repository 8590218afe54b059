//! Serializable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "tgeo-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// One residual compared against one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        // NaN never passes
        let verdict = Verdict::from_bool(max_residual <= tolerance);
        CheckResult { name: name.into(), samples, max_residual, tolerance, verdict }
    }
}

/// Outcome of one command. The top-level residual and tolerance are those of
/// the worst check (largest residual/tolerance ratio), so the verdict passes
/// exactly when `max_residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub check: String,
    pub parameters: BTreeMap<String, Value>,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Mathematical conclusion where one applies, e.g. "stable".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
    #[serde(default)]
    pub data: BTreeMap<String, Value>,
    pub wall_time: f64,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            schema: SCHEMA.into(),
            check: check.into(),
            parameters: BTreeMap::new(),
            samples: 0,
            max_residual: 0.0,
            tolerance: 0.0,
            verdict: Verdict::Pass,
            conclusion: None,
            checks: Vec::new(),
            notes: Vec::new(),
            data: BTreeMap::new(),
            wall_time: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.into(), value.into());
        self
    }

    pub fn datum(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.data.insert(key.into(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn push(&mut self, check: CheckResult) -> &mut Self {
        self.checks.push(check);
        self.summarize();
        self
    }

    /// Recompute the top-level fields from the check list.
    pub fn summarize(&mut self) {
        self.samples = self.checks.iter().map(|c| c.samples).max().unwrap_or(0);
        let ratio = |c: &CheckResult| {
            if c.max_residual.is_nan() {
                f64::INFINITY
            } else {
                c.max_residual / c.tolerance
            }
        };
        if let Some(worst) = self
            .checks
            .iter()
            .max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
        {
            self.max_residual = worst.max_residual;
            self.tolerance = worst.tolerance;
        }
        self.verdict = Verdict::from_bool(self.checks.iter().all(|c| c.verdict.is_pass()));
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Copy with the wall time zeroed, for reproducibility comparisons.
    pub fn without_wall_time(&self) -> Self {
        VerificationReport { wall_time: 0.0, ..self.clone() }
    }
}
