//! Named verification results, serialized as JSON report rows.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub parameters: Value,
}

impl CheckResult {
    /// A check that passes when `residual ≤ tolerance`. NaN never passes.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            parameters: Value::Null,
        }
    }

    /// A check that passes when `value ≥ threshold`; the residual is the value.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            check_name: name.into(),
            passed: value >= threshold,
            residual: value,
            tolerance: threshold,
            parameters: Value::Null,
        }
    }

    pub fn with_parameters(mut self, parameters: Value) -> Self {
        self.parameters = parameters;
        self
    }
}

/// True when every row passed.
pub fn all_passed(rows: &[CheckResult]) -> bool {
    rows.iter().all(|r| r.passed)
}
