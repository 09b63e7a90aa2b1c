//! Self-checks behind `tomoprob verify`: each criterion compares a fast path
//! against a closed form or the oracle and reports the worst deviation.

mod dynamics;
mod statics;

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use dynamics::{criterion_5, criterion_6, criterion_7, fit_frequency};
pub use statics::{criterion_1, criterion_2, criterion_3, criterion_4, criterion_8, criterion_9};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    Default,
    /// Every tolerance divided by ten.
    Strict,
}

impl ToleranceProfile {
    pub fn scale(self) -> f64 {
        match self {
            Self::Default => 1.0,
            Self::Strict => 0.1,
        }
    }
}

impl FromStr for ToleranceProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Self::Default),
            "strict" => Ok(Self::Strict),
            other => Err(Error::Config(format!("unknown tolerance profile {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Specfun,
    Symtomo,
    Spintomo,
    Evolution,
    Landau,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "specfun" => Self::Specfun,
            "symtomo" => Self::Symtomo,
            "spintomo" => Self::Spintomo,
            "evolution" => Self::Evolution,
            "landau" => Self::Landau,
            "all" => Self::All,
            other => return Err(Error::Config(format!("unknown suite {other:?}"))),
        })
    }
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Self::Specfun => &[8],
            Self::Symtomo => &[2, 4, 9],
            Self::Spintomo => &[1, 3, 9],
            Self::Evolution => &[5, 6],
            Self::Landau => &[7],
            Self::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: String,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Reported for comparison only; never fails a suite.
    #[serde(default)]
    pub informational: bool,
    pub elapsed_s: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CriterionReport {
    pub(crate) fn new(id: &str, name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            measured,
            tolerance,
            passed: measured.is_finite() && measured <= tolerance,
            informational: false,
            elapsed_s: 0.0,
            detail: String::new(),
        }
    }

    pub(crate) fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub(crate) fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    /// Whether this report should fail a suite.
    pub fn is_failure(&self) -> bool {
        !self.passed && !self.informational
    }

    /// Failure report for a check that could not be evaluated.
    pub(crate) fn errored(id: &str, name: &str, tolerance: f64, e: &Error) -> Self {
        Self::new(id, name, f64::INFINITY, tolerance).with_detail(e.to_string())
    }

    /// One-line `PASS`/`FAIL` summary.
    pub fn line(&self) -> String {
        let verdict = match (self.passed, self.informational) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "INFO",
        };
        let mut s = format!(
            "[{verdict}] {:<6} {:<52} measured={:.3e} tol={:.1e} ({:.2}s)",
            self.id, self.name, self.measured, self.tolerance, self.elapsed_s
        );
        if !self.detail.is_empty() {
            s.push_str(" ; ");
            s.push_str(&self.detail);
        }
        s
    }
}

/// Runs one criterion and stamps every report with the elapsed time.
pub fn run_criterion(id: u8, profile: ToleranceProfile) -> Vec<CriterionReport> {
    let start = Instant::now();
    let mut reports = match id {
        1 => criterion_1(profile),
        2 => criterion_2(profile),
        3 => criterion_3(profile),
        4 => criterion_4(profile),
        5 => criterion_5(profile),
        6 => criterion_6(profile),
        7 => criterion_7(profile),
        8 => criterion_8(profile),
        9 => criterion_9(profile),
        _ => vec![CriterionReport::errored(&id.to_string(), "unknown criterion", 0.0, &Error::Config("no such criterion".into()))],
    };
    let elapsed = start.elapsed().as_secs_f64();
    for r in &mut reports {
        r.elapsed_s = elapsed;
    }
    reports
}

pub fn run_suite(suite: Suite, profile: ToleranceProfile) -> Vec<CriterionReport> {
    suite.criteria().iter().flat_map(|&id| run_criterion(id, profile)).collect()
}

/// Worst value of a fallible sequence of deviations.
pub(crate) fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |acc, v| v.map(|v| if v.is_nan() { f64::INFINITY } else { acc.max(v) }))
}

pub(crate) fn report(id: &str, name: &str, tol: f64, measured: Result<f64>) -> CriterionReport {
    match measured {
        Ok(m) => CriterionReport::new(id, name, m, tol),
        Err(e) => CriterionReport::errored(id, name, tol, &e),
    }
}
