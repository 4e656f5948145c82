//! Versioned JSON report emitted by the command-line front end.

use crate::algebra::CheckOutcome;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA: &str = "ncgcurv-report/1";

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub geometry: String,
    /// "symbolic" or the rational q with L = e^{2 pi i q}.
    pub theta: String,
    pub seed: u64,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, serde_json::Value>,
    pub status: String,
}

#[derive(Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Report {
    pub fn new(geometry: &str, theta: &str, seed: u64) -> Self {
        Report {
            schema: SCHEMA,
            geometry: geometry.to_string(),
            theta: theta.to_string(),
            seed,
            checks: Vec::new(),
            objects: BTreeMap::new(),
            status: "pass".into(),
        }
    }

    pub fn push_checks(&mut self, checks: impl IntoIterator<Item = CheckOutcome>) {
        for c in checks {
            if !c.passed {
                self.status = "fail".into();
            }
            self.checks.push(CheckEntry {
                name: c.name,
                status: if c.passed { "pass".into() } else { "fail".into() },
                witness: c.witness,
            });
        }
    }

    pub fn insert_object(&mut self, key: &str, value: serde_json::Value) {
        self.objects.insert(key.to_string(), value);
    }

    pub fn all_passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
