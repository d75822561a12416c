//! Pass/fail records shared by all verifiers. Failures are data: every
//! check returns a report, and the first counterexample in sweep order is
//! kept so results do not depend on thread scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub law: String,
    /// Labelled arguments, e.g. `("sigma", "(1)")`.
    pub at: Vec<(String, String)>,
    pub lhs: String,
    pub rhs: String,
}

impl Counterexample {
    pub fn new(law: impl Into<String>, at: Vec<(&str, String)>, lhs: impl ToString, rhs: impl ToString) -> Self {
        Self {
            law: law.into(),
            at: at.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }

    pub fn describe(&self) -> String {
        let at: Vec<String> = self.at.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{} fails at {}: {} != {}", self.law, at.join(", "), self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>, checked: usize) -> Self {
        Self { name: name.into(), passed: true, checked, counterexample: None }
    }

    pub fn fail(name: impl Into<String>, checked: usize, cx: Counterexample) -> Self {
        Self { name: name.into(), passed: false, checked, counterexample: Some(cx) }
    }

    /// Merges several reports: passes iff all pass, keeps the first
    /// counterexample in argument order.
    pub fn combine(name: impl Into<String>, parts: &[CheckReport]) -> Self {
        let checked = parts.iter().map(|p| p.checked).sum();
        match parts.iter().find_map(|p| p.counterexample.clone()) {
            Some(cx) => Self::fail(name, checked, cx),
            None if parts.iter().all(|p| p.passed) => Self::pass(name, checked),
            None => Self { name: name.into(), passed: false, checked, counterexample: None },
        }
    }
}

/// Runs `check` over `items` in parallel. Each call returns the number of
/// equations it tested and its first failure. Evaluation errors are turned
/// into counterexamples labelled with `law = "evaluation"`.
///
/// Items after the lowest failing index are skipped. Every item before it is
/// always evaluated, so the counterexample and the `checked` total (which
/// covers items up to and including the failing one) are deterministic.
pub fn sweep<T, F>(name: &str, items: &[T], check: F) -> CheckReport
where
    T: Sync,
    F: Fn(&T) -> Result<(usize, Option<Counterexample>)> + Sync,
{
    let first_bad = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<(usize, Option<Counterexample>)>> = items
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            if i > first_bad.load(Ordering::Relaxed) {
                return None;
            }
            let r = match check(item) {
                Ok(r) => r,
                Err(e) => (1, Some(Counterexample::new("evaluation", vec![], e.to_string(), "a value"))),
            };
            if r.1.is_some() {
                first_bad.fetch_min(i, Ordering::Relaxed);
            }
            Some(r)
        })
        .collect();
    let stop = first_bad.into_inner();
    let kept = results.into_iter().take(stop.saturating_add(1)).map(|r| r.expect("items before the first failure are evaluated"));
    let mut checked = 0;
    let mut cx = None;
    for (n, c) in kept {
        checked += n;
        if cx.is_none() {
            cx = c;
        }
    }
    match cx {
        Some(cx) => CheckReport::fail(name, checked, cx),
        None => CheckReport::pass(name, checked),
    }
}

/// Accumulates equations inside one sweep cell and remembers the first
/// violated one.
#[derive(Default)]
pub struct Tally {
    pub checked: usize,
    pub first: Option<Counterexample>,
}

impl Tally {
    pub fn check<T: PartialEq + ToString>(&mut self, law: &str, at: impl FnOnce() -> Vec<(&'static str, String)>, lhs: &T, rhs: &T) {
        self.checked += 1;
        if self.first.is_none() && lhs != rhs {
            self.first = Some(Counterexample::new(law, at(), lhs.to_string(), rhs.to_string()));
        }
    }

    pub fn done(self) -> Result<(usize, Option<Counterexample>)> {
        Ok((self.checked, self.first))
    }
}

/// A named group of checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl Verification {
    pub fn new(name: impl Into<String>, checks: Vec<CheckReport>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { name: name.into(), passed, checks }
    }

    pub fn first_failure(&self) -> Option<&Counterexample> {
        self.checks.iter().find_map(|c| c.counterexample.as_ref())
    }

    pub fn failed_check(&self) -> Option<&CheckReport> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn total_checked(&self) -> usize {
        self.checks.iter().map(|c| c.checked).sum()
    }
}
