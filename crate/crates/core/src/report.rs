//! Verification reports: JSON and CSV with every float at 17 significant digits.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One verified quantity. `margin ≥ 0` means it passed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub nk: String,
    pub backend: String,
    pub values: BTreeMap<String, f64>,
    pub margin: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseResult {
    pub fn new(name: impl Into<String>, nk: impl Into<String>, backend: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            nk: nk.into(),
            backend: backend.into(),
            values: BTreeMap::new(),
            margin: 0.0,
            pass: true,
            error: None,
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    /// Sets the margin; the case passes iff it is non-negative and finite.
    pub fn margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self.pass = margin >= 0.0;
        self
    }

    /// A case that could not be evaluated.
    pub fn failed(name: impl Into<String>, nk: impl Into<String>, backend: impl Into<String>, error: &str) -> Self {
        let mut c = Self::new(name, nk, backend);
        c.margin = f64::NAN;
        c.pass = false;
        c.error = Some(error.to_string());
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Name of the case with the smallest margin.
    pub worst_case: Option<String>,
    pub worst_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub config_echo: Value,
    pub suite: String,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
}

impl Report {
    /// Sorts cases by name and fills the summary.
    pub fn new(suite: impl Into<String>, config_echo: Value, mut cases: Vec<CaseResult>) -> Self {
        cases.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = cases.iter().filter(|c| c.pass).count();
        let worst = cases
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin).then_with(|| a.name.cmp(&b.name)));
        let summary = Summary {
            total: cases.len(),
            passed,
            failed: cases.len() - passed,
            worst_case: worst.map(|c| c.name.clone()),
            worst_margin: worst.map(|c| c.margin),
        };
        Self { version: REPORT_VERSION.to_string(), config_echo, suite: suite.into(), cases, summary }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&with_17_digits(v)).expect("value serializes")
    }

    /// Header `name,nk,backend,margin,pass,<value keys…>` then one row per case.
    pub fn to_csv(&self) -> String {
        let keys: BTreeSet<&String> = self.cases.iter().flat_map(|c| c.values.keys()).collect();
        let mut out = String::from("name,nk,backend,margin,pass");
        for k in &keys {
            out.push(',');
            out.push_str(&csv_field(k));
        }
        out.push('\n');
        for c in &self.cases {
            let mut row = vec![csv_field(&c.name), csv_field(&c.nk), csv_field(&c.backend), fmt17(c.margin), c.pass.to_string()];
            row.extend(keys.iter().map(|k| c.values.get(*k).map(|v| fmt17(*v)).unwrap_or_default()));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// One line per case plus a summary line.
    pub fn table(&self) -> String {
        let width = self.cases.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&format!(
                "{:<4} {:<width$} {:>5} margin {}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.nk,
                fmt17(c.margin)
            ));
        }
        out.push_str(&format!(
            "{}: {} of {} passed\n",
            self.suite, self.summary.passed, self.summary.total
        ));
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `x` with 17 significant digits; `nan`, `inf` and `-inf` for non-finite values.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Rewrites every non-integer number in `v` with 17 significant digits.
/// Non-finite values, which JSON cannot carry, were already mapped to `null`.
pub fn with_17_digits(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => match n.as_f64() {
            Some(x) if x.is_finite() => Value::Number(Number::from_str(&fmt17(x)).expect("valid number")),
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(with_17_digits).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, with_17_digits(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// Pretty JSON of any serializable value with 17-digit floats.
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serializes");
    serde_json::to_string_pretty(&with_17_digits(v)).expect("value serializes")
}
