//! Reports printed by every verb, as text or as versioned JSON.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Process exit codes.
pub mod code {
    pub const POSITIVE: i32 = 0;
    pub const NEGATIVE: i32 = 1;
    pub const ERROR: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const FRAGMENT: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Positive,
    Negative,
    Error,
    Budget,
    Fragment,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Positive => code::POSITIVE,
            Outcome::Negative => code::NEGATIVE,
            Outcome::Error => code::ERROR,
            Outcome::Budget => code::BUDGET,
            Outcome::Fragment => code::FRAGMENT,
        }
    }
}

/// The result of one verb. In text mode `text` (artifacts such as
/// interpretations, formulae and plan files) goes to stdout, and the
/// verdict line followed by `log` goes to stderr. `details` holds the
/// structured form for `--json`.
#[derive(Debug)]
pub struct Report {
    pub verb: &'static str,
    pub outcome: Outcome,
    pub verdict: String,
    pub text: String,
    pub log: Vec<String>,
    pub details: Value,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    verb: &'a str,
    outcome: Outcome,
    exit_code: i32,
    verdict: &'a str,
    details: &'a Value,
}

impl Report {
    pub fn new(verb: &'static str, outcome: Outcome, verdict: impl Into<String>) -> Self {
        Report { verb, outcome, verdict: verdict.into(), text: String::new(), log: Vec::new(), details: Value::Object(Default::default()) }
    }

    pub fn text(mut self, text: impl Into<String>) -> Self {
        self.text = text.into();
        self
    }

    pub fn log(mut self, lines: Vec<String>) -> Self {
        self.log = lines;
        self
    }

    pub fn details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn to_json(&self) -> String {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            verb: self.verb,
            outcome: self.outcome,
            exit_code: self.outcome.exit_code(),
            verdict: &self.verdict,
            details: &self.details,
        };
        serde_json::to_string_pretty(&env).expect("reports serialize")
    }
}
