//! Verification reports: one record per check, a JSON array on disk and an
//! aligned summary table on standard output.
//!
//! The JSON form is deterministic for a fixed (config, seed): records are
//! sorted by check name and wall-clock timings stay out of the file (they
//! appear only in the table).

use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Duration;

use crate::error::Result;
use crate::linalg::Residual;
use crate::scalar::Mode;

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    /// Unique check name (also the RNG stream label).
    pub name: String,
    /// The identity or property the check exercises.
    pub identity: String,
    /// Arithmetic mode the check ran in.
    pub mode: Mode,
    /// Digest of the parameters and draw counts used.
    pub params: String,
    /// Worst residual as a decimal string; `"0"` for an exact zero.
    pub residual: String,
    pub pass: bool,
    /// Extra diagnostics; empty when there is nothing to add.
    #[serde(default)]
    pub detail: String,
}

impl CheckReport {
    /// Builds a report from a residual under the pass rule
    /// `pass ⇔ residual ≤ tolerance` (exact residuals must be zero).
    pub fn from_residual(
        name: &str,
        identity: &str,
        mode: Mode,
        params: String,
        residual: &Residual,
        tolerance: f64,
        detail: String,
    ) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            identity: identity.to_string(),
            mode,
            params,
            residual: residual.to_string(),
            pass: residual.passes(tolerance),
            detail,
        }
    }

    /// Builds a failure report from an error.
    pub fn from_error(
        name: &str,
        identity: &str,
        mode: Mode,
        params: String,
        error: &crate::error::Error,
    ) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            identity: identity.to_string(),
            mode,
            params,
            residual: "n/a".to_string(),
            pass: false,
            detail: error.to_string(),
        }
    }
}

/// A check report paired with its wall time (table display only).
#[derive(Clone, Debug)]
pub struct TimedReport {
    pub report: CheckReport,
    pub wall: Duration,
}

/// A full suite run, ordered by check name.
#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    checks: Vec<TimedReport>,
}

impl SuiteReport {
    pub fn new(mut checks: Vec<TimedReport>) -> SuiteReport {
        checks.sort_by(|a, b| a.report.name.cmp(&b.report.name));
        SuiteReport { checks }
    }

    pub fn reports(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().map(|t| &t.report)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|t| t.report.pass)
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|t| !t.report.pass).count()
    }

    /// The deterministic JSON array (no timings).
    pub fn to_json(&self) -> Result<String> {
        let reports: Vec<&CheckReport> = self.checks.iter().map(|t| &t.report).collect();
        Ok(serde_json::to_string_pretty(&reports)? + "\n")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Aligned human-readable table with timings and a final tally.
    pub fn summary_table(&self) -> String {
        let name_w = self
            .checks
            .iter()
            .map(|t| t.report.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let res_w = self
            .checks
            .iter()
            .map(|t| t.report.residual.len())
            .max()
            .unwrap_or(8)
            .max(8);
        let mut out = String::new();
        out.push_str(&format!(
            "{:<name_w$}  {:<5}  {:<6}  {:>res_w$}  {:>9}  detail\n",
            "check", "mode", "status", "residual", "time"
        ));
        for t in &self.checks {
            let status = if t.report.pass { "pass" } else { "FAIL" };
            let millis = t.wall.as_secs_f64() * 1e3;
            let detail = if t.report.detail.is_empty() {
                t.report.params.as_str()
            } else {
                t.report.detail.as_str()
            };
            out.push_str(&format!(
                "{:<name_w$}  {:<5}  {:<6}  {:>res_w$}  {:>8.1}ms  {}\n",
                t.report.name, t.report.mode, status, t.report.residual, millis, detail
            ));
        }
        out.push_str(&format!(
            "\n{} checks, {} failed, total {:.2}s\n",
            self.len(),
            self.failed(),
            self.checks.iter().map(|t| t.wall.as_secs_f64()).sum::<f64>()
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn sample_report(name: &str, pass: bool) -> TimedReport {
        TimedReport {
            report: CheckReport {
                name: name.into(),
                identity: "exchange-relation".into(),
                mode: Mode::Exact,
                params: "L=3 draws=2".into(),
                residual: "0".into(),
                pass,
                detail: String::new(),
            },
            wall: Duration::from_millis(12),
        }
    }

    #[test]
    fn reports_sort_by_name_and_serialize() {
        let suite = SuiteReport::new(vec![sample_report("zeta", true), sample_report("alpha", true)]);
        let json = suite.to_json().unwrap();
        let parsed: Vec<CheckReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].name, "alpha");
        assert_eq!(parsed[1].name, "zeta");
        assert!(suite.all_pass());
        // timings never reach the JSON
        assert!(!json.contains("wall"));
        assert!(!json.contains("time"));
    }

    #[test]
    fn residual_pass_rule() {
        let zero = Residual::Exact(BigRational::zero());
        let r = CheckReport::from_residual(
            "x",
            "exchange-relation",
            Mode::Exact,
            String::new(),
            &zero,
            1e-10,
            String::new(),
        );
        assert!(r.pass);
        assert_eq!(r.residual, "0");
        let bad = Residual::Float(1e-3);
        let r = CheckReport::from_residual(
            "x",
            "exchange-relation",
            Mode::Float,
            String::new(),
            &bad,
            1e-10,
            String::new(),
        );
        assert!(!r.pass);
    }

    #[test]
    fn failure_counting_and_table() {
        let suite = SuiteReport::new(vec![sample_report("a", true), sample_report("b", false)]);
        assert!(!suite.all_pass());
        assert_eq!(suite.failed(), 1);
        let table = suite.summary_table();
        assert!(table.contains("FAIL"));
        assert!(table.contains("2 checks, 1 failed"));
    }
}
