//! Check blocks: named residuals, their thresholds and a derived status.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckBlock {
    pub name: String,
    pub status: Status,
    pub residuals: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null", default)]
    pub certificates: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckBlock {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Pass,
            residuals: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            certificates: serde_json::Value::Null,
            note: None,
        }
    }

    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        let mut b = Self::new(name);
        b.status = Status::Skip;
        b.note = Some(note.into());
        b
    }

    /// Record `value ≤ threshold`. A NaN residual fails.
    pub fn residual(mut self, key: impl Into<String>, value: f64, threshold: f64) -> Self {
        let key = key.into();
        if !(value <= threshold) {
            self.status = Status::Fail;
        }
        self.residuals.insert(key.clone(), value);
        self.thresholds.insert(key, threshold);
        self
    }

    /// Boolean condition recorded as residual 0 (holds) or 1 (violated).
    pub fn condition(self, key: impl Into<String>, holds: bool) -> Self {
        self.residual(key, if holds { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn certificates(mut self, value: serde_json::Value) -> Self {
        self.certificates = value;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// Keys whose residual exceeds the threshold.
    pub fn violations(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(k, v)| !(**v <= self.thresholds[*k]))
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

pub fn all_passed(blocks: &[CheckBlock]) -> bool {
    blocks.iter().all(CheckBlock::passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_residuals() {
        let b = CheckBlock::new("x").residual("a", 1e-9, 1e-8);
        assert_eq!(b.status, Status::Pass);
        let b = b.residual("b", 2.0, 1.0).condition("c", true);
        assert_eq!(b.status, Status::Fail);
        assert_eq!(b.violations(), vec!["b"]);
        assert_eq!(CheckBlock::new("n").residual("nan", f64::NAN, 1.0).status, Status::Fail);
    }
}
