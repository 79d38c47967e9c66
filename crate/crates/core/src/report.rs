//! Check verdicts and validation reports shared by every validator.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check does not apply (e.g. Bosbach on a non-divisible hoop).
    Skipped,
}

/// How much of a carrier a universally quantified check actually covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Exhaustive,
    /// All elements whose coordinates are bounded by the given value.
    Window(u32),
    Sampled(usize),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Exhaustive => f.write_str("exhaustive"),
            Scope::Window(n) => write!(f, "window-verified ({n})"),
            Scope::Sampled(n) => write!(f, "sampled ({n})"),
        }
    }
}

impl Serialize for Scope {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A counterexample: the offending elements and the two sides that disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub lhs: String,
    pub rhs: String,
}

impl Failure {
    pub fn new(lhs: impl fmt::Display, rhs: impl fmt::Display) -> Self {
        Failure {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub axiom: String,
    pub verdict: Verdict,
    pub scope: Scope,
    pub instances: u64,
    pub witness: Option<Vec<String>>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
}

impl Check {
    pub fn pass(axiom: impl Into<String>, scope: Scope, instances: u64) -> Self {
        Check {
            axiom: axiom.into(),
            verdict: Verdict::Pass,
            scope,
            instances,
            witness: None,
            lhs: None,
            rhs: None,
        }
    }

    pub fn fail(
        axiom: impl Into<String>,
        scope: Scope,
        instances: u64,
        witness: Vec<String>,
        failure: Failure,
    ) -> Self {
        Check {
            axiom: axiom.into(),
            verdict: Verdict::Fail,
            scope,
            instances,
            witness: Some(witness),
            lhs: Some(failure.lhs),
            rhs: Some(failure.rhs),
        }
    }

    pub fn skipped(axiom: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            axiom: axiom.into(),
            verdict: Verdict::Skipped,
            scope: Scope::Exhaustive,
            instances: 0,
            witness: None,
            lhs: Some(reason.into()),
            rhs: None,
        }
    }

    /// Builds a pass/fail check from a single boolean fact.
    pub fn fact(axiom: impl Into<String>, holds: bool, lhs: impl fmt::Display, rhs: impl fmt::Display) -> Self {
        if holds {
            Check::pass(axiom, Scope::Exhaustive, 1)
        } else {
            Check::fail(axiom, Scope::Exhaustive, 1, Vec::new(), Failure::new(lhs, rhs))
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    fn prefixed(mut self, prefix: &str) -> Self {
        self.axiom = format!("{prefix}{}", self.axiom);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    /// Derived classifications such as `prelinear` or `cancellative`.
    pub flags: BTreeMap<String, bool>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.flags.insert(name.to_string(), value);
    }

    pub fn get_flag(&self, name: &str) -> Option<bool> {
        self.flags.get(name).copied()
    }

    /// True when no check failed.
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn check(&self, axiom: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn passes(&self, axiom: &str) -> bool {
        self.check(axiom).is_some_and(|c| c.verdict == Verdict::Pass)
    }

    /// Appends another report's checks, prefixing their axiom names.
    pub fn absorb(&mut self, prefix: &str, other: ValidationReport) {
        self.checks
            .extend(other.checks.into_iter().map(|c| c.prefixed(prefix)));
        for (k, v) in other.flags {
            self.flags.insert(format!("{prefix}{k}"), v);
        }
    }

    /// One-line description of the first failure, for error messages.
    pub fn first_failure(&self) -> Option<String> {
        self.failures().next().map(|c| {
            format!(
                "{} fails at [{}]: {} != {}",
                c.axiom,
                c.witness.as_deref().unwrap_or_default().join(", "),
                c.lhs.as_deref().unwrap_or(""),
                c.rhs.as_deref().unwrap_or("")
            )
        })
    }
}
