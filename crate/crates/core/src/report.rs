//! Common JSON report emitted by every identity checker.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Scalar;
use crate::rmatrix::RMode;
use crate::tensor::Residual;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub entry: String,
    pub index: [usize; 2],
}

impl<S: Scalar> From<Residual<S>> for ResidualEntry {
    fn from(r: Residual<S>) -> Self {
        ResidualEntry { entry: r.value.to_string(), index: [r.row, r.col] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub identity: String,
    pub mode: String,
    pub order: Option<usize>,
    pub params: BTreeMap<String, String>,
    pub pass: bool,
    pub residual: Option<ResidualEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn new(identity: &str, mode: RMode) -> Self {
        let (mode, order) = match mode {
            RMode::Bare => ("bare".to_string(), None),
            RMode::Normalized { order } => ("normalized".to_string(), Some(order)),
        };
        CheckReport {
            identity: identity.to_string(),
            mode,
            order,
            params: BTreeMap::new(),
            pass: false,
            residual: None,
            details: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    /// Pass iff there is no residual.
    pub fn with_residual<S: Scalar>(mut self, residual: Option<Residual<S>>) -> Self {
        self.pass = residual.is_none();
        self.residual = residual.map(Into::into);
        self
    }
}
