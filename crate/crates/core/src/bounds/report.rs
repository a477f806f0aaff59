use serde::Serialize;

/// Outcome of one named inequality check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Human-readable description of the sampled domain or the row checked.
    #[serde(rename = "box")]
    pub domain: String,
    pub resolution: Option<usize>,
    pub samples: u64,
    /// Smallest observed value of (left side - right side), oriented so that
    /// a non-negative margin means the inequality holds.
    pub worst_margin: f64,
    /// Sample point at which `worst_margin` was attained, when meaningful.
    pub worst_at: Option<Vec<f64>>,
    /// Margins at or above `-slack` pass.
    pub slack: f64,
    /// A strict inequality: the margin must be strictly positive.
    pub strict: bool,
    /// Recorded for reference only; does not affect the report verdict.
    pub informational: bool,
    pub passed: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, domain: impl Into<String>, worst_margin: f64) -> Self {
        let mut c = Self {
            name: name.into(),
            domain: domain.into(),
            resolution: None,
            samples: 1,
            worst_margin,
            worst_at: None,
            slack: 0.0,
            strict: false,
            informational: false,
            passed: false,
        };
        c.update_verdict();
        c
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self.update_verdict();
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self.update_verdict();
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_grid(mut self, resolution: usize, samples: u64, worst_at: Vec<f64>) -> Self {
        self.resolution = Some(resolution);
        self.samples = samples;
        self.worst_at = Some(worst_at);
        self
    }

    /// Forces a verdict regardless of the margin; used when the margin is not
    /// what decides the check (for instance a short-circuit condition).
    pub fn with_verdict(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    fn update_verdict(&mut self) {
        let m = self.worst_margin;
        self.passed = if self.strict {
            m > 0.0
        } else {
            m >= -self.slack
        };
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub wall_time_seconds: f64,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, checks: Vec<CheckResult>, wall_time_seconds: f64) -> Self {
        let passed = checks.iter().all(|c| c.informational || c.passed);
        Self {
            suite: suite.into(),
            checks,
            passed,
            wall_time_seconds,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.informational && !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Concatenates reports, keeping check order.
    pub fn merge(suite: impl Into<String>, parts: Vec<VerificationReport>) -> Self {
        let wall = parts.iter().map(|p| p.wall_time_seconds).sum();
        let checks = parts.into_iter().flat_map(|p| p.checks).collect();
        Self::new(suite, checks, wall)
    }
}
