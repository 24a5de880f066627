use std::collections::BTreeMap;

use qkz_core::report::CheckReport;
use qkz_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_POLE: i32 = 3;

/// Everything a subcommand emits. Checks are sorted by their key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    pub pass: bool,
    pub exit_code: i32,
    pub seed: u64,
    #[serde(default)]
    pub checks: Vec<CheckReport>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        _ if e.is_pole() => EXIT_POLE,
        Error::InvalidConfig(_) | Error::Parse(_) | Error::BadLegIndex { .. } | Error::DimensionMismatch(_) => {
            EXIT_CONFIG
        }
        Error::AtStep { source, .. } => exit_code_for(source),
        _ => EXIT_FAIL,
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::PoleEncountered(_) => "pole",
        Error::NonNilpotentConstantTerm => "non_nilpotent_constant_term",
        Error::UnboundedOrder => "unbounded_order",
        Error::NotInvertible(_) => "not_invertible",
        Error::BadLegIndex { .. } => "bad_leg_index",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::SingularOperator(_) => "singular_operator",
        Error::InvalidConfig(_) => "config",
        Error::Parse(_) => "parse",
        Error::AtStep { source, .. } => kind(source),
    }
}

impl ErrorReport {
    pub fn from_error(e: &Error) -> Self {
        let step = match e {
            Error::AtStep { step, .. } => Some(*step),
            _ => None,
        };
        ErrorReport { kind: kind(e).into(), message: e.to_string(), step }
    }
}

fn check_key(c: &CheckReport) -> (String, String, Option<usize>, String) {
    (c.identity.clone(), c.mode.clone(), c.order, serde_json::to_string(&c.params).unwrap_or_default())
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        RunReport {
            command: command.into(),
            pass: true,
            exit_code: EXIT_PASS,
            seed,
            checks: Vec::new(),
            data: BTreeMap::new(),
            error: None,
        }
    }

    pub fn push(&mut self, c: CheckReport) {
        self.checks.push(c);
    }

    pub fn data(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.into(), v.into());
    }

    pub fn finish(mut self) -> Self {
        self.checks.sort_by_cached_key(check_key);
        self.pass = self.checks.iter().all(|c| c.pass);
        self.exit_code = if self.pass { EXIT_PASS } else { EXIT_FAIL };
        self
    }

    pub fn failed(command: &str, seed: u64, e: &Error) -> Self {
        RunReport {
            pass: false,
            exit_code: exit_code_for(e),
            error: Some(ErrorReport::from_error(e)),
            ..RunReport::new(command, seed)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
