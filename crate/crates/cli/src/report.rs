//! The JSON report document.

use chernlab_core::{CMatrix, ChartPoint};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::Suite;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Everything but `timing` is a function of the config alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub scene: Value,
    pub config: Value,
    pub results: Vec<Value>,
    pub pass: bool,
    /// Worst residual or violation over all checks; 0 when nothing was measured.
    pub max_residual: f64,
    pub error: Option<ErrorInfo>,
    pub timing: Timing,
}

impl Report {
    pub fn new(suite: Suite, config: Value) -> Self {
        Self {
            suite: suite.name().to_string(),
            scene: Value::Null,
            config,
            results: Vec::new(),
            pass: false,
            max_residual: 0.0,
            error: None,
            timing: Timing::default(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report with the timing field zeroed, for comparisons.
    pub fn without_timing(&self) -> Report {
        Report {
            timing: Timing::default(),
            ..self.clone()
        }
    }
}

pub fn point_json(p: &ChartPoint) -> Value {
    Value::Array(p.coords().iter().map(|z| json!([z.re, z.im])).collect())
}

/// Row-major `[[re, im], …]` rows.
pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}
