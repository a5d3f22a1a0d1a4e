use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "igusa-report/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub case: String,
    pub passed: bool,
    /// Set when the case could not run; counts as a failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl SuiteResult {
    pub fn ok(suite: &str, case: String, passed: bool, details: impl Serialize) -> Self {
        SuiteResult {
            suite: suite.into(),
            case,
            passed,
            error: None,
            details: serde_json::to_value(details).expect("report details serialize"),
            elapsed_ms: None,
        }
    }

    pub fn failed(suite: &str, case: String, error: impl ToString) -> Self {
        SuiteResult { suite: suite.into(), case, passed: false, error: Some(error.to_string()), details: Value::Null, elapsed_ms: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    pub summary: Summary,
    pub results: Vec<SuiteResult>,
}

impl Report {
    pub fn new(command: &str, seed: u64, results: Vec<SuiteResult>) -> Self {
        let passed_count = results.iter().filter(|r| r.passed).count();
        Report {
            schema: SCHEMA,
            command: command.into(),
            seed,
            passed: passed_count == results.len(),
            summary: Summary { cases: results.len(), passed: passed_count, failed: results.len() - passed_count },
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
