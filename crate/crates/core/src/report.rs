//! Structured pass/fail records for identity and axiom checks.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Where a check failed: the inputs, the offending monomial (if any) and both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: String,
    pub monomial: Option<String>,
    pub lhs: String,
    pub rhs: String,
}

impl Witness {
    pub fn new(inputs: impl Into<String>, monomial: Option<String>, lhs: impl fmt::Display, rhs: impl fmt::Display) -> Self {
        Witness { inputs: inputs.into(), monomial, lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    pub fn from_error(inputs: impl Into<String>, err: &Error) -> Self {
        Witness { inputs: inputs.into(), monomial: None, lhs: format!("error: {err}"), rhs: "-".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new(subject: impl Into<String>) -> Self {
        CheckReport { subject: subject.into(), checks: Vec::new() }
    }

    pub fn pass(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), status: Status::Pass, detail: detail.into(), witness: None });
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>, witness: Witness) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Fail,
            detail: detail.into(),
            witness: Some(witness),
        });
    }

    /// Records the outcome of a check that either finds a witness or errors out.
    pub fn record(&mut self, name: &str, detail: impl Into<String>, outcome: Result<Option<Witness>, Error>) {
        match outcome {
            Ok(None) => self.pass(name, detail),
            Ok(Some(w)) => self.fail(name, detail, w),
            Err(e) => self.fail(name, detail, Witness::from_error(name, &e)),
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Status of the named check; `None` if it never ran.
    pub fn status(&self, name: &str) -> Option<Status> {
        let mut found = None;
        for c in self.checks.iter().filter(|c| c.name == name) {
            if c.status == Status::Fail {
                return Some(Status::Fail);
            }
            found = Some(Status::Pass);
        }
        found
    }

    pub fn passed(&self, name: &str) -> bool {
        self.status(name) == Some(Status::Pass)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.status(name) == Some(Status::Fail)
    }

    /// Checks sorted by name, keeping the original order among equal names.
    pub fn sorted_checks(&self) -> Vec<&Check> {
        let mut v: Vec<&Check> = self.checks.iter().collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    pub fn to_json(&self) -> Value {
        let sorted = self.sorted_checks();
        let checks: Vec<Value> = sorted
            .iter()
            .map(|c| json!({ "name": c.name, "status": c.status, "detail": c.detail }))
            .collect();
        let witnesses: Vec<Value> = sorted
            .iter()
            .filter_map(|c| {
                c.witness.as_ref().map(|w| {
                    json!({
                        "check": c.name,
                        "inputs": w.inputs,
                        "monomial": w.monomial,
                        "lhs": w.lhs,
                        "rhs": w.rhs,
                    })
                })
            })
            .collect();
        json!({
            "version": REPORT_VERSION,
            "subject": self.subject,
            "passed": self.all_passed(),
            "checks": checks,
            "witnesses": witnesses,
        })
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in self.sorted_checks() {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            if c.detail.is_empty() {
                writeln!(f, "  {tag} {}", c.name)?;
            } else {
                writeln!(f, "  {tag} {} ({})", c.name, c.detail)?;
            }
            if let Some(w) = &c.witness {
                writeln!(f, "       inputs: {}", w.inputs)?;
                if let Some(m) = &w.monomial {
                    writeln!(f, "       at {m}: lhs = {}, rhs = {}", w.lhs, w.rhs)?;
                } else {
                    writeln!(f, "       lhs = {}, rhs = {}", w.lhs, w.rhs)?;
                }
            }
        }
        let total = self.checks.len();
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", total, failed)
    }
}
