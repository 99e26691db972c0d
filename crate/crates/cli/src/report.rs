//! Verification reports: a versioned JSON document and a text summary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "schober-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The computation itself failed, e.g. a window was too small.
    Error,
}

/// One named sub-check of a task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskResult {
    pub check_id: String,
    pub check: String,
    pub verdict: Verdict,
    pub checks: Vec<CheckLine>,
    /// Why a sub-check failed, when it did.
    pub witnesses: Vec<String>,
    pub window: Option<i64>,
    /// Computed values backing the verdict.
    pub certificates: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub manifest: String,
    /// SHA-256 of the manifest bytes.
    pub manifest_digest: String,
    pub tasks: Vec<TaskResult>,
    /// Tasks not run because of `--fail-fast`.
    pub skipped: Vec<String>,
}

pub fn digest(source: &[u8]) -> String {
    Sha256::digest(source).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn passed(&self) -> usize {
        self.tasks.iter().filter(|t| t.verdict == Verdict::Pass).count()
    }

    pub fn total(&self) -> usize {
        self.tasks.len() + self.skipped.len()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// One line per task, witnesses under failures, and a closing tally.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} (manifest digest {})\n", self.manifest, &self.manifest_digest[..16]);
        for t in &self.tasks {
            let tag = match t.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Error => "ERROR",
            };
            out += &format!("{tag} {} [{}]\n", t.check_id, t.check);
            for c in &t.checks {
                if t.verdict != Verdict::Pass {
                    out += &format!("    [{}] {}\n", if c.ok { "ok" } else { "FAILED" }, c.name);
                }
            }
            for w in &t.witnesses {
                out += &format!("    witness: {w}\n");
            }
        }
        for s in &self.skipped {
            out += &format!("SKIP {s}\n");
        }
        let (p, n) = (self.passed(), self.total());
        if self.all_passed() {
            out += &format!("ALL CHECKS PASSED ({p}/{n})\n");
        } else {
            out += &format!("CHECKS FAILED ({p}/{n} passed)\n");
        }
        out
    }
}
