//! Pass/fail checks and the `summary.json` layout.

use serde::Serialize;
use serde_json::{Map, Value};

/// One asserted criterion.  `value` is compared against `bound` in the
/// direction given by `relation`; a NaN value never passes.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub relation: &'static str,
    pub bound: f64,
}

impl Check {
    pub fn at_most(criterion: u32, name: &str, value: f64, bound: f64) -> Self {
        Check { criterion, name: name.into(), passed: value <= bound, value, relation: "<=", bound }
    }

    pub fn at_least(criterion: u32, name: &str, value: f64, bound: f64) -> Self {
        Check { criterion, name: name.into(), passed: value >= bound, value, relation: ">=", bound }
    }

    pub fn below(criterion: u32, name: &str, value: f64, bound: f64) -> Self {
        Check { criterion, name: name.into(), passed: value < bound, value, relation: "<", bound }
    }

    /// A count of violations that must be zero.
    pub fn none(criterion: u32, name: &str, violations: usize) -> Self {
        Self::at_most(criterion, name, violations as f64, 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metrics: Map<String, Value>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Report { experiment: experiment.into(), passed: true, checks: Vec::new(), metrics: Map::new() }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metrics.insert(key.into(), v);
    }

    /// Checks of one criterion, all of which must pass.
    pub fn criterion(&self, n: u32) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.criterion == n)
    }
}
