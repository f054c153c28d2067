//! Verdicts of bounded-exhaustive checks.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Binding {
    pub var: String,
    pub value: String,
}

/// Variable bindings that falsify a statement, printed in surface syntax.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct Counterexample(pub Vec<Binding>);

impl Counterexample {
    pub fn new() -> Counterexample {
        Counterexample(Vec::new())
    }

    pub fn with(mut self, var: &str, value: impl fmt::Display) -> Counterexample {
        self.0.push(Binding {
            var: var.to_string(),
            value: value.to_string(),
        });
        self
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.iter().find(|b| b.var == var).map(|b| b.value.as_str())
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} = {}", b.var, b.value)?;
        }
        Ok(())
    }
}

/// Cases examined so far and the first falsifying one, if any.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub cases: u64,
    pub counterexample: Option<Counterexample>,
}

impl Outcome {
    pub fn pass(cases: u64) -> Outcome {
        Outcome {
            cases,
            counterexample: None,
        }
    }

    pub fn fail(cases: u64, cex: Counterexample) -> Outcome {
        Outcome {
            cases,
            counterexample: Some(cex),
        }
    }

    /// A single case.
    pub fn check(holds: bool, cex: impl FnOnce() -> Counterexample) -> Outcome {
        if holds {
            Outcome::pass(1)
        } else {
            Outcome::fail(1, cex())
        }
    }

    /// Sums case counts and keeps the earlier counterexample.
    pub fn and(self, other: Outcome) -> Outcome {
        Outcome {
            cases: self.cases + other.cases,
            counterexample: self.counterexample.or(other.counterexample),
        }
    }

    pub fn is_pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl FromIterator<Outcome> for Outcome {
    fn from_iter<I: IntoIterator<Item = Outcome>>(iter: I) -> Outcome {
        iter.into_iter().fold(Outcome::default(), Outcome::and)
    }
}

/// Runs `check` on every item on the current rayon pool. The result does
/// not depend on scheduling: counts are summed and the counterexample is
/// the one from the earliest failing item.
pub fn check_all<T, F>(items: &[T], check: F) -> Outcome
where
    T: Sync,
    F: Fn(&T) -> Outcome + Sync + Send,
{
    let parts: Vec<Outcome> = items.par_iter().map(check).collect();
    parts.into_iter().collect()
}

/// Sequential counterpart of [`check_all`] for inner loops.
pub fn check_seq<T, F>(items: impl IntoIterator<Item = T>, mut check: F) -> Outcome
where
    F: FnMut(T) -> Outcome,
{
    let mut acc = Outcome::default();
    for x in items {
        acc = acc.and(check(x));
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub cases: u64,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub elapsed: Duration,
}

/// The serialized form of a [`CheckReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord<'a> {
    pub name: &'a str,
    pub cases: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<&'a Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl CheckReport {
    pub fn from_outcome(name: &str, outcome: Outcome, elapsed: Duration) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            cases: outcome.cases,
            verdict: if outcome.is_pass() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            counterexample: outcome.counterexample,
            elapsed,
        }
    }

    /// Times `run` and wraps its outcome.
    pub fn run(name: &str, run: impl FnOnce() -> Outcome) -> CheckReport {
        let start = Instant::now();
        let outcome = run();
        CheckReport::from_outcome(name, outcome, start.elapsed())
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Elapsed time is left out unless asked for, so records of identical
    /// runs compare equal byte for byte.
    pub fn record(&self, timings: bool) -> ReportRecord<'_> {
        ReportRecord {
            name: &self.name,
            cases: self.cases,
            verdict: self.verdict,
            counterexample: self.counterexample.as_ref(),
            elapsed_ms: timings.then_some(self.elapsed.as_millis()),
        }
    }

    pub fn text_line(&self, timings: bool) -> String {
        let mut line = format!("{} {} ({} cases)", self.verdict, self.name, self.cases);
        if timings {
            line.push_str(&format!(" [{} ms]", self.elapsed.as_millis()));
        }
        if let Some(cex) = &self.counterexample {
            line.push_str(&format!("\n    counterexample: {cex}"));
        }
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_counterexample_wins() {
        let items: Vec<u32> = (0..100).collect();
        let out = check_all(&items, |&i| {
            Outcome::check(i % 7 != 3, || Counterexample::new().with("i", i))
        });
        assert_eq!(out.cases, 100);
        assert_eq!(out.counterexample.unwrap().get("i"), Some("3"));
    }

    #[test]
    fn fail_implies_counterexample() {
        let r = CheckReport::run("x", || Outcome::fail(2, Counterexample::new().with("G", "nil")));
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.counterexample.is_some());
        assert_eq!(r.text_line(false), "FAIL x (2 cases)\n    counterexample: G = nil");
    }
}
