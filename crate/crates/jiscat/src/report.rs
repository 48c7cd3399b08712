//! Structured pass/fail reports used by the class validators and the
//! identity checkers. Validators never throw; they return one of these.

/// A single named check with its residual.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// Residual when the check is quantitative, `None` for pure predicates.
    pub residual: Option<f64>,
    pub detail: String,
}

/// Ordered list of checks for one validator run.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub checks: Vec<CheckItem>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, residual: Option<f64>, detail: impl Into<String>) {
        self.checks.push(CheckItem {
            name: name.into(),
            passed,
            residual,
            detail: detail.into(),
        });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Largest residual among quantitative checks, 0 if there are none.
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// One-line summary naming the first failed check, for error messages.
    pub fn failure_summary(&self) -> String {
        match self.first_failure() {
            Some(c) => format!("{}: {}", c.name, c.detail),
            None => "all checks passed".to_string(),
        }
    }
}
