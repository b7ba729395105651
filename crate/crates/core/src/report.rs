//! Machine-readable verification reports.
//!
//! JSON field names are part of the CLI contract: `checks[].name`,
//! `checks[].claim_ref`, `checks[].status`, `checks[].detail`,
//! `checks[].values` and `summary.{passed,failed,reported}`. Numbers inside
//! `values` are strings: shortest round-trip decimals for floats and `p/q`
//! for exact rationals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational; never counts as a failure.
    Reported,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub claim_ref: String,
    pub status: Status,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<BTreeMap<String, String>>,
}

impl Check {
    pub fn new(name: &str, claim_ref: &str, status: Status, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_owned(),
            claim_ref: claim_ref.to_owned(),
            status,
            detail: detail.into(),
            values: None,
        }
    }

    pub fn pass_if(name: &str, claim_ref: &str, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self::new(name, claim_ref, status, detail)
    }

    pub fn with_value(mut self, key: &str, value: impl ToString) -> Self {
        self.values
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_owned(), value.to_string());
        self
    }

    pub fn with_f64(self, key: &str, value: f64) -> Self {
        self.with_value(key, fmt_f64(value))
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Shortest decimal that parses back to the same double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub reported: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>) -> Self {
        let mut summary = Summary::default();
        for check in &checks {
            match check.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Reported => summary.reported += 1,
            }
        }
        Self { checks, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// 0 iff nothing failed.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_counts_and_exit_code() {
        let report = VerificationReport::new(vec![
            Check::pass_if("a", "Eq. (3.2)", true, ""),
            Check::new("b", "Remark", Status::Reported, "info"),
        ]);
        assert_eq!(report.summary, Summary { passed: 1, failed: 0, reported: 1 });
        assert_eq!(report.exit_code(), 0);

        let report = VerificationReport::new(vec![Check::pass_if("a", "Eq. (3.3)", false, "")]);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn json_round_trip() {
        let report = VerificationReport::new(vec![Check::pass_if("a", "Eq. (3.1)", true, "ok")
            .with_f64("x", 0.1)
            .with_value("b_2", "1/24")]);
        let text = report.to_json();
        assert!(text.contains("\"status\": \"pass\""));
        assert!(text.contains("\"x\": \"0.1\""));
        assert_eq!(VerificationReport::from_json(&text).unwrap(), report);
    }

    #[test]
    fn shortest_float_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5, std::f64::consts::E] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
