//! Library side of the `chernlab` command: config ingestion, suite
//! execution and report emission.

pub mod config;
pub mod output;
pub mod report;
pub mod suites;

use std::time::Instant;

use serde_json::Value;

pub use config::{RunConfig, Suite};
pub use output::Table;
pub use report::{ErrorInfo, Report, Timing};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Invalid,
    Hypothesis,
    Numerical,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Invalid => "invalid_input",
            ErrorKind::Hypothesis => "hypothesis_not_met",
            ErrorKind::Numerical => "numerical",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Invalid => exit::INVALID,
            ErrorKind::Hypothesis => exit::FAIL,
            ErrorKind::Numerical => exit::NUMERICAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub kind: ErrorKind,
    pub message: String,
}

impl RunError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Invalid,
            message: msg.into(),
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.message)
    }
}

impl std::error::Error for RunError {}

impl From<chernlab_core::Error> for RunError {
    fn from(e: chernlab_core::Error) -> Self {
        use chernlab_core::Error as E;
        let kind = match &e {
            E::HypothesisFail(_) | E::KahlerRequired { .. } => ErrorKind::Hypothesis,
            E::InvalidArgument(_) => ErrorKind::Invalid,
            _ if e.is_numerical() => ErrorKind::Numerical,
            _ => ErrorKind::Invalid,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

/// What one invocation produced.
pub struct Outcome {
    pub report: Report,
    pub table: Option<Table>,
    pub exit_code: i32,
}

/// Runs `suite` on the config text. Never panics on bad input: every
/// failure is folded into the report and the exit code.
pub fn run(suite: Suite, config_text: &str, seed: Option<u64>) -> Outcome {
    let start = Instant::now();
    let echo: Value = serde_json::from_str(config_text).unwrap_or(Value::Null);
    let mut report = Report::new(suite, echo);
    let mut table = None;

    let result = RunConfig::from_json(config_text).and_then(|mut cfg| {
        if let Some(s) = cfg.suite {
            if s != suite {
                return Err(RunError::invalid(format!("config is for suite '{s}', but '{suite}' was requested")));
            }
        }
        if let Some(seed) = seed {
            cfg.seed = seed;
        }
        let ctx = suites::Context::new(cfg)?;
        report.scene = ctx.scene.describe();
        report.config = serde_json::to_value(&ctx.cfg).expect("config serializes");
        suites::run_suite(suite, &ctx)
    });

    let exit_code = match result {
        Ok(out) => {
            report.results = out.results;
            report.pass = out.pass;
            report.max_residual = out.max_residual;
            table = out.table;
            if out.pass {
                exit::PASS
            } else {
                exit::FAIL
            }
        }
        Err(e) => {
            report.pass = false;
            let code = e.kind.exit_code();
            report.error = Some(ErrorInfo {
                kind: e.kind.name().to_string(),
                message: e.message,
            });
            code
        }
    };
    report.timing = Timing {
        seconds: start.elapsed().as_secs_f64(),
    };
    Outcome {
        report,
        table,
        exit_code,
    }
}
