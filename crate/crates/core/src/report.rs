//! Pass/fail reports with witnesses.

use std::fmt;

use serde::Serialize;

/// Where a check failed: basis or variable indices, and for series
/// identities the offending monomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Witness {
    pub fn indices(indices: &[usize]) -> Self {
        Witness { indices: indices.to_vec(), alpha: None, detail: String::new() }
    }

    pub fn monomial(indices: &[usize], alpha: &[u32]) -> Self {
        Witness { indices: indices.to_vec(), alpha: Some(alpha.to_vec()), detail: String::new() }
    }

    pub fn detail(detail: impl Into<String>) -> Self {
        Witness { indices: Vec::new(), alpha: None, detail: detail.into() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.indices.is_empty() {
            parts.push(format!("indices {:?}", self.indices));
        }
        if let Some(a) = &self.alpha {
            parts.push(format!("monomial {a:?}"));
        }
        if !self.detail.is_empty() {
            parts.push(self.detail.clone());
        }
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a check; `failure` is `None` when it passed.
    pub fn record(&mut self, name: impl Into<String>, failure: Option<Witness>) {
        self.checks.push(CheckResult { name: name.into(), passed: failure.is_none(), witness: failure });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.record(name, None);
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: Witness) {
        self.record(name, Some(witness));
    }

    /// Appends every check of `other`, prefixing names with `prefix/`.
    pub fn merge(&mut self, prefix: &str, other: ValidationReport) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}/{}", c.name);
            }
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            match &c.witness {
                Some(w) => writeln!(f, "{status:4}  {}  ({w})", c.name)?,
                None => writeln!(f, "{status:4}  {}", c.name)?,
            }
        }
        Ok(())
    }
}
