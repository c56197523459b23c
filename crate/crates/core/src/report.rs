//! Structured pass/fail reports shared by the verification entry points.

use serde::{Deserialize, Serialize};

/// Schema tag stamped on every serialized report.
pub const REPORT_SCHEMA: &str = "decay-report/v1";

/// One named check with its measured constant and a human-readable detail
/// line. `measured` is whatever quantity the check is about (a constant, an
/// index, a worst margin); the detail string says which.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub details: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, measured: f64, details: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            measured,
            details,
        }
    }
}

/// A bag of checks produced by one verification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub subject: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(subject: &str) -> Self {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            subject: subject.to_string(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Merge another report's checks under a prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[{}] {}", self.schema, self.subject)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {} {:<44} measured = {:>13.6e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.details
            )?;
        }
        Ok(())
    }
}
