use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use srf_core::hp::to_decimal;
use srf_core::{BoundCheck, CoefficientVector, HpComplex, SupportSet};

use crate::args::RunConfig;
use crate::error::CliResult;

pub const SCHEMA_VERSION: &str = "1";

/// A high-precision number as a decimal string with its mantissa precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HpNumber {
    pub value: String,
    pub bits: u32,
}

impl From<&Float> for HpNumber {
    fn from(x: &Float) -> Self {
        Self { value: to_decimal(x), bits: x.prec() }
    }
}

pub fn num(x: &Float) -> Value {
    json!(HpNumber::from(x))
}

pub fn complex(z: &HpComplex) -> Value {
    json!({ "re": num(&z.re), "im": num(&z.im) })
}

pub fn support(t: &SupportSet) -> Value {
    json!(t.offsets())
}

/// Parallel decimal arrays of real and imaginary parts.
pub fn coefficients(x: &CoefficientVector) -> Value {
    let bits = x.values.first().map_or(0, |v| v.prec());
    json!({
        "support": support(&x.support),
        "re": x.values.iter().map(|v| to_decimal(&v.re)).collect::<Vec<_>>(),
        "im": x.values.iter().map(|v| to_decimal(&v.im)).collect::<Vec<_>>(),
        "bits": bits,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: HpNumber,
    pub rhs: HpNumber,
    pub slack: HpNumber,
    pub satisfied: bool,
}

impl From<&BoundCheck> for CheckRecord {
    fn from(c: &BoundCheck) -> Self {
        Self {
            name: c.name.clone(),
            lhs: (&c.lhs).into(),
            rhs: (&c.rhs).into(),
            slack: (&c.slack).into(),
            satisfied: c.satisfied,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Some checks could not be evaluated.
    Partial,
}

/// A plot-ready table emitted instead of the check rows in CSV output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// What a subcommand produced, before it is wrapped into a [`Report`].
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub results: Value,
    pub checks: Vec<CheckRecord>,
    /// Verdicts that are not inequalities, such as acceptance criteria.
    pub verdicts: Vec<bool>,
    /// Parts that could not be evaluated, with the reason.
    pub incomplete: Vec<String>,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn new(results: Value) -> Self {
        Self { results, ..Self::default() }
    }

    pub fn with_checks<'a>(mut self, checks: impl IntoIterator<Item = &'a BoundCheck>) -> Self {
        self.checks.extend(checks.into_iter().map(CheckRecord::from));
        self
    }

    pub fn status(&self) -> Status {
        if !self.incomplete.is_empty() {
            Status::Partial
        } else if self.checks.iter().all(|c| c.satisfied) && self.verdicts.iter().all(|v| *v) {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub tool_version: String,
    pub config: RunConfig,
    pub timestamp: String,
    pub results: Value,
    pub checks: Vec<CheckRecord>,
    pub status: Status,
}

impl Report {
    pub fn new(config: RunConfig, outcome: &Outcome) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config,
            timestamp: chrono::Utc::now().to_rfc3339(),
            results: outcome.results.clone(),
            checks: outcome.checks.clone(),
            status: outcome.status(),
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub const CHECK_COLUMNS: [&str; 5] = ["name", "lhs", "rhs", "slack", "satisfied"];

/// CSV of the outcome's table, or of its checks when it has none.
pub fn to_csv(outcome: &Outcome) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &outcome.table {
        Some(t) => {
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
        }
        None => {
            w.write_record(CHECK_COLUMNS)?;
            for c in &outcome.checks {
                let satisfied = c.satisfied.to_string();
                w.write_record([c.name.as_str(), &c.lhs.value, &c.rhs.value, &c.slack.value, &satisfied])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses CSV written by [`to_csv`] back into its header and rows.
pub fn parse_csv(s: &str) -> CliResult<Table> {
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| Ok(rec?.iter().map(str::to_string).collect())).collect::<CliResult<_>>()?;
    Ok(Table { columns, rows })
}
