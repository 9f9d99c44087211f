//! JSON report documents. Field order is fixed by the struct definitions, so
//! identical inputs serialize to identical bytes.

use dpgamma_core::linalg::RootInterval;
use dpgamma_core::real::{CReal, Real};
use dpgamma_core::{QMatrix, Rat};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// A multi-precision number printed to `digits` significant digits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decimal {
    pub value: String,
    pub digits: u32,
}

impl Decimal {
    pub fn new(x: &Real, digits: u32) -> Self {
        Decimal { value: x.to_sci(digits as usize), digits }
    }
}

/// A double with a bound on its distance to the true value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Approx {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Cplx { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CDecimal {
    pub re: Decimal,
    pub im: Decimal,
}

impl CDecimal {
    pub fn new(z: &CReal, digits: u32) -> Self {
        CDecimal { re: Decimal::new(&z.re, digits), im: Decimal::new(&z.im, digits) }
    }
}

/// Exact rational interval `(lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: String,
    pub hi: String,
}

impl From<&RootInterval> for Interval {
    fn from(i: &RootInterval) -> Self {
        Interval { lo: i.lo.to_string(), hi: i.hi.to_string() }
    }
}

pub fn exact(q: &Rat) -> String {
    q.to_string()
}

pub fn matrix(m: &QMatrix) -> Vec<Vec<String>> {
    m.rows().iter().map(|r| r.iter().map(exact).collect()).collect()
}

/// The settings a report depends on. The output path is left out so that
/// the same run written to different files gives the same bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub tolerance: f64,
    pub precision_digits: u32,
    pub t_grid: Vec<f64>,
    pub seed: u64,
    pub gw_table: String,
    pub max_terms: usize,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        ConfigEcho {
            tolerance: c.tolerance,
            precision_digits: c.precision_digits,
            t_grid: c.t_grid.clone(),
            seed: c.seed,
            gw_table: c.gw_table_path.as_ref().map_or_else(|| "bundled".to_string(), |p| p.display().to_string()),
            max_terms: c.max_terms,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The input was outside what the command handles.
    Error,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One entry of `results`: a target, its status and the command-specific
/// payload.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub target: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl Entry {
    pub fn ok<T: Serialize>(target: impl Into<String>, pass: bool, data: &T) -> Entry {
        Entry {
            target: target.into(),
            status: Status::from_bool(pass),
            message: None,
            data: Some(serde_json::to_value(data).expect("report types serialize")),
        }
    }

    pub fn failed(target: impl Into<String>, status: Status, message: impl Into<String>) -> Entry {
        Entry { target: target.into(), status, message: Some(message.into()), data: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub target: String,
    pub config: ConfigEcho,
    pub status: Status,
    pub results: Vec<Entry>,
}

impl Report {
    pub fn new(command: &str, target: &str, config: &RunConfig, results: Vec<Entry>) -> Report {
        let status = results.iter().map(|e| e.status).max().unwrap_or(Status::Pass);
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            target: target.to_string(),
            config: config.into(),
            status,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types serialize");
        s.push('\n');
        s
    }

    /// 0 when everything passed, 1 on a failed check, 2 on bad input.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}
