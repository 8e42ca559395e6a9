use modtau::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::complex_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub op: String,
    pub message: String,
}

/// Keys serialize in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub residuals: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub pass: bool,
    pub timing_ms: u64,
    pub warnings: Vec<Warning>,
    /// Failures that are not a residual above its tolerance.
    #[serde(skip)]
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
            residuals: Map::new(),
            tolerances: Map::new(),
            pass: false,
            timing_ms: 0,
            warnings: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn output(&mut self, key: &str, v: impl Into<Value>) {
        self.outputs.insert(key.to_string(), v.into());
    }

    pub fn output_c(&mut self, key: &str, z: C64) {
        self.outputs.insert(key.to_string(), complex_json(z));
    }

    /// Non-finite residuals are stored as null and fail.
    pub fn residual(&mut self, key: &str, r: f64, tol: f64) {
        let v = if r.is_finite() { Value::from(r) } else { Value::Null };
        self.residuals.insert(key.to_string(), v);
        self.tolerances.insert(key.to_string(), Value::from(tol));
    }

    pub fn warn(&mut self, op: &str, message: impl Into<String>) {
        self.warnings.push(Warning { op: op.to_string(), message: message.into() });
    }

    /// Records a numerical error raised by `op` as a failure.
    pub fn fail(&mut self, op: &str, message: impl Into<String>) {
        let message = message.into();
        self.failures.push(format!("{op}: {message}"));
        self.warn(op, message);
    }

    /// Residual names at or above their tolerance.
    pub fn failing_residuals(&self) -> Vec<String> {
        self.residuals
            .iter()
            .filter(|(k, v)| {
                let tol = self.tolerances.get(*k).and_then(Value::as_f64).unwrap_or(0.0);
                v.as_f64().is_none_or(|r| r >= tol)
            })
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn finalize(&mut self, timing_ms: u64) {
        self.pass = self.failures.is_empty() && self.failing_residuals().is_empty();
        self.timing_ms = timing_ms;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
