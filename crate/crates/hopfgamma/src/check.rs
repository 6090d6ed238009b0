//! Structured pass/fail reports.
//!
//! Verifiers return a [`CheckReport`] instead of erroring out: a failing
//! axiom is a result, not an exception.

use serde::{Deserialize, Serialize};

/// One named check with its outcome and free-form evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    /// Human-readable witness: which basis triple failed, a rank, a dimension list.
    pub detail: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub evidence: serde_json::Value,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport { entries: vec![] }
    }

    pub fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.entries.push(CheckEntry {
            name: name.to_string(),
            passed,
            detail: detail.into(),
            evidence: serde_json::Value::Null,
        });
    }

    pub fn push_with_evidence(
        &mut self,
        name: &str,
        passed: bool,
        detail: impl Into<String>,
        evidence: serde_json::Value,
    ) {
        self.entries.push(CheckEntry {
            name: name.to_string(),
            passed,
            detail: detail.into(),
            evidence,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failed(&self) -> Vec<&CheckEntry> {
        self.entries.iter().filter(|e| !e.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Merge another report under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for mut e in other.entries {
            e.name = format!("{prefix}.{}", e.name);
            self.entries.push(e);
        }
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{} {} {}",
                if e.passed { "PASS" } else { "FAIL" },
                e.name,
                e.detail
            )?;
        }
        Ok(())
    }
}
