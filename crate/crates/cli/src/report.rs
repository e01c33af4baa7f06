//! Report envelope and exit-code mapping.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "lidskii-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Top-level outcome of a subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    CertifiedGlobal,
    ConsistentWithLocalMin,
    NotLocalMin,
    ViolatesStructure,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success | Outcome::CertifiedGlobal | Outcome::ConsistentWithLocalMin => 0,
            Outcome::NotLocalMin | Outcome::ViolatesStructure => 2,
            Outcome::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub schema_version: u32,
    pub command: &'static str,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub parameters: Value,
    pub result: Value,
}

impl Report {
    pub fn new(command: &'static str, outcome: Outcome, parameters: Value, result: Value) -> Self {
        Report {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            command,
            outcome,
            exit_code: outcome.exit_code(),
            parameters,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
