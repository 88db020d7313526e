use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const FORMAT: &str = "massey-report/1";

/// One verification outcome. `criterion` ties the row to a numbered acceptance criterion.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckRow {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    pub passed: bool,
    pub detail: String,
    /// Smallest failing instance, when the check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, criterion: Option<u8>, passed: bool, detail: impl Into<String>) -> Self {
        CheckRow {
            name: name.into(),
            criterion,
            passed,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Option<Value>) -> Self {
        if !self.passed {
            self.witness = w;
        }
        self
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Budgets {
    pub max_elems: u64,
    pub max_nodes: u64,
    /// Resources actually consumed, by name.
    pub used: BTreeMap<String, u64>,
}

impl Budgets {
    pub fn record(&mut self, key: &str, v: u64) {
        let e = self.used.entry(key.to_string()).or_insert(0);
        *e = (*e).max(v);
    }

    pub fn add(&mut self, key: &str, v: u64) {
        *self.used.entry(key.to_string()).or_insert(0) += v;
    }
}

/// The JSON document written to stdout. Contains no timing, so repeated runs are byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub format: &'static str,
    pub version: &'static str,
    pub command: Value,
    pub input_digest: String,
    pub results: Value,
    pub checks: Vec<CheckRow>,
    pub passed: bool,
    pub budgets: Budgets,
}

impl Report {
    pub fn new(command: Value, input: &[u8], results: Value, checks: Vec<CheckRow>, budgets: Budgets) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Report {
            format: FORMAT,
            version: env!("CARGO_PKG_VERSION"),
            command,
            input_digest: sha256_hex(input),
            results,
            checks,
            passed,
            budgets,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Serialize into a JSON value; maps come out with sorted keys.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("value serializes")
}
