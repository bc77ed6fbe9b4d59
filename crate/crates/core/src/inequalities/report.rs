//! Margin reports and their JSON/CSV serialization.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rational::{self, Rational};

/// Identities pass when |margin| ≤ tol, inequalities when margin ≥ −tol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Identity,
    Inequality,
    /// An identity between two independent computations of one object.
    CrossPath,
    /// Reported only; never affects the outcome.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    Symbolic,
    Quadrature,
    Spectral,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub group: String,
    pub function: String,
    pub params: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// rhs − lhs.
    pub margin: Option<f64>,
    /// The effective tolerance the margin was judged against.
    pub tolerance: f64,
    pub pass: bool,
    pub kind: CheckKind,
    pub path: EvalPath,
    pub status: Status,
    pub note: String,
}

/// Tolerance tiers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub symbolic: f64,
    pub quadrature: f64,
    pub compound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { symbolic: 1e-10, quadrature: 1e-9, compound: 1e-8 }
    }
}

impl Tolerances {
    /// All tiers replaced by one value.
    pub fn uniform(tol: f64) -> Self {
        Tolerances { symbolic: tol, quadrature: tol, compound: tol }
    }
}

/// Where a report comes from: check id, group and function.
#[derive(Clone, Debug)]
pub struct Subject {
    pub id: String,
    pub group: String,
    pub function: String,
    pub params: String,
}

impl Subject {
    pub fn new(id: &str, group: &str, function: impl Into<String>, params: impl Into<String>) -> Self {
        Subject { id: id.to_string(), group: group.to_string(), function: function.into(), params: params.into() }
    }

    fn report(self, kind: CheckKind, path: EvalPath, lhs: f64, rhs: f64, tolerance: f64) -> CheckReport {
        let margin = rhs - lhs;
        let ok = match kind {
            CheckKind::Identity | CheckKind::CrossPath => margin.abs() <= tolerance,
            CheckKind::Inequality => margin >= -tolerance,
            CheckKind::Info => true,
        };
        let status = match kind {
            CheckKind::Info => Status::Info,
            _ if ok => Status::Pass,
            _ => Status::Fail,
        };
        CheckReport {
            id: self.id,
            group: self.group,
            function: self.function,
            params: self.params,
            lhs: Some(lhs),
            rhs: Some(rhs),
            margin: Some(margin),
            tolerance,
            pass: status != Status::Fail,
            kind,
            path,
            status,
            note: String::new(),
        }
    }

    /// Exact sides; the margin is rounded once from the exact difference.
    fn report_exact(self, kind: CheckKind, path: EvalPath, lhs: &Rational, rhs: &Rational, tol: f64) -> CheckReport {
        let mut r = self.report(kind, path, rational::to_f64(lhs), rational::to_f64(rhs), tol);
        let margin = rational::to_f64(&(rhs - lhs));
        let ok = match kind {
            CheckKind::Identity | CheckKind::CrossPath => margin.abs() <= tol,
            CheckKind::Inequality => margin >= -tol,
            CheckKind::Info => true,
        };
        r.margin = Some(margin);
        if kind != CheckKind::Info {
            r.status = if ok { Status::Pass } else { Status::Fail };
            r.pass = ok;
        }
        r
    }

    pub fn identity_exact(self, path: EvalPath, lhs: &Rational, rhs: &Rational, tol: f64) -> CheckReport {
        self.report_exact(CheckKind::Identity, path, lhs, rhs, tol)
    }

    pub fn inequality_exact(self, path: EvalPath, lhs: &Rational, rhs: &Rational, tol: f64) -> CheckReport {
        self.report_exact(CheckKind::Inequality, path, lhs, rhs, tol)
    }

    pub fn cross_path_exact(self, path: EvalPath, lhs: &Rational, rhs: &Rational, tol: f64) -> CheckReport {
        self.report_exact(CheckKind::CrossPath, path, lhs, rhs, tol)
    }

    /// |rhs − lhs| ≤ tol.
    pub fn identity(self, path: EvalPath, lhs: f64, rhs: f64, tol: f64) -> CheckReport {
        self.report(CheckKind::Identity, path, lhs, rhs, tol)
    }

    /// lhs ≤ rhs + tol.
    pub fn inequality(self, path: EvalPath, lhs: f64, rhs: f64, tol: f64) -> CheckReport {
        self.report(CheckKind::Inequality, path, lhs, rhs, tol)
    }

    pub fn cross_path(self, path: EvalPath, lhs: f64, rhs: f64, tol: f64) -> CheckReport {
        self.report(CheckKind::CrossPath, path, lhs, rhs, tol)
    }

    pub fn info(self, path: EvalPath, lhs: f64, rhs: f64) -> CheckReport {
        self.report(CheckKind::Info, path, lhs, rhs, 0.0)
    }

    /// A check that could not run; `kind` is what it would have been.
    pub fn skipped(self, kind: CheckKind, path: EvalPath, reason: impl Into<String>) -> CheckReport {
        CheckReport {
            id: self.id,
            group: self.group,
            function: self.function,
            params: self.params,
            lhs: None,
            rhs: None,
            margin: None,
            tolerance: 0.0,
            pass: true,
            kind,
            path,
            status: Status::Skipped,
            note: reason.into(),
        }
    }

    /// A check whose computation raised an error; recorded as a failure.
    pub fn errored(self, kind: CheckKind, path: EvalPath, err: &crate::Error) -> CheckReport {
        let mut r = self.skipped(kind, path, format!("error: {err}"));
        r.status = Status::Fail;
        r.pass = false;
        r
    }
}

impl CheckReport {
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.note.is_empty() {
            self.note = note;
        } else if !note.is_empty() {
            self.note = format!("{}; {note}", self.note);
        }
        self
    }

    /// The ordering key used for deterministic output.
    pub fn key(&self) -> (&str, &str, &str, &str) {
        (&self.id, &self.group, &self.function, &self.params)
    }

    /// A failed cross-path check signals an internal inconsistency.
    pub fn is_cross_path_failure(&self) -> bool {
        self.status == Status::Fail && self.kind == CheckKind::CrossPath
    }
}

/// Sorts by (id, group, function, params); the sort is stable so equal keys
/// keep their generation order.
pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by(|a, b| a.key().cmp(&b.key()));
}

/// Counts by status.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub info: usize,
    pub cross_path_failures: usize,
}

pub fn summarize(reports: &[CheckReport]) -> Summary {
    let mut s = Summary::default();
    for r in reports {
        match r.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Skipped => s.skipped += 1,
            Status::Info => s.info += 1,
        }
        if r.is_cross_path_failure() {
            s.cross_path_failures += 1;
        }
    }
    s
}

pub fn to_json(reports: &[CheckReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

pub fn from_json(text: &str) -> Result<Vec<CheckReport>> {
    Ok(serde_json::from_str(text)?)
}

/// Fixed CSV columns.
pub const CSV_COLUMNS: [&str; 12] =
    ["id", "group", "function", "params", "kind", "path", "status", "lhs", "rhs", "margin", "tolerance", "pass"];

fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn number(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(reports: &[CheckReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.id.clone(),
            r.group.clone(),
            r.function.clone(),
            r.params.clone(),
            label(&r.kind),
            label(&r.path),
            label(&r.status),
            number(r.lhs),
            number(r.rhs),
            number(r.margin),
            format!("{:e}", r.tolerance),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(reports: &[CheckReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn subject() -> Subject {
        Subject::new("demo", "rank1:k=1", "x", "t=1")
    }

    #[test]
    fn pass_rules_by_kind() {
        assert!(subject().inequality(EvalPath::Symbolic, 1.0, 2.0, 0.0).pass);
        assert!(!subject().identity(EvalPath::Symbolic, 1.0, 2.0, 0.5).pass);
        assert!(subject().identity(EvalPath::Symbolic, 1.0, 1.0 + 1e-12, 1e-10).pass);
        assert!(!subject().inequality(EvalPath::Symbolic, 2.0, 1.0, 1e-3).pass);
        assert_eq!(subject().info(EvalPath::Spectral, 5.0, 1.0).status, Status::Info);
        let nan = subject().inequality(EvalPath::Quadrature, f64::NAN, 0.0, 1.0);
        assert!(!nan.pass);
    }

    #[test]
    fn exact_margins_avoid_cancellation() {
        let big = rational::parse("1e20").unwrap();
        let r = subject().inequality_exact(EvalPath::Symbolic, &big, &(&big + rational::ratio(1, 1000)), 0.0);
        assert_eq!(r.margin, Some(0.001));
        assert!(r.pass);
        let r = subject().identity_exact(EvalPath::Symbolic, &big, &(&big - rational::int(1)), 0.5);
        assert!(!r.pass);
    }

    #[test]
    fn cross_path_failures_are_flagged() {
        let r = subject().cross_path(EvalPath::Both, 0.0, 1.0, 1e-8);
        assert!(r.is_cross_path_failure());
        assert_eq!(summarize(&[r]).cross_path_failures, 1);
    }

    #[test]
    fn csv_has_fixed_header() {
        let csv = to_csv(&[subject().identity(EvalPath::Symbolic, 1.0, 1.0, 0.0)]).unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert!(csv.contains("identity,symbolic,pass"));
    }

    proptest! {
        #[test]
        fn pass_iff_margin_within_tolerance(lhs in -1e6f64..1e6, rhs in -1e6f64..1e6, tol in 0.0f64..10.0) {
            let r = subject().inequality(EvalPath::Quadrature, lhs, rhs, tol);
            prop_assert_eq!(r.pass, r.margin.unwrap() >= -tol);
            let r = subject().identity(EvalPath::Quadrature, lhs, rhs, tol);
            prop_assert_eq!(r.pass, r.margin.unwrap().abs() <= tol);
        }

        #[test]
        fn json_round_trips(lhs in -1e6f64..1e6, rhs in -1e6f64..1e6) {
            let reports = vec![
                subject().inequality(EvalPath::Spectral, lhs, rhs, 1e-9).with_note("scaled"),
                subject().skipped(CheckKind::Identity, EvalPath::Quadrature, "hypothesis: γ = 0"),
            ];
            let back = from_json(&to_json(&reports).unwrap()).unwrap();
            prop_assert_eq!(back, reports);
        }
    }
}
