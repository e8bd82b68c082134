use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Outcome of one experiment: its inputs, the bound checks it ran and
/// the measured data.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub params: Value,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Report {
    pub fn new(experiment: &str, params: Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            params,
            checks: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
