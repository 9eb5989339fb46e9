use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of a single check: name, parameters, status and witness data.
///
/// `existential` marks checks whose pass must be backed by witnesses; it is
/// enforced when a certificate is assembled and is not serialized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    pub witnesses: Vec<Value>,
    #[serde(skip)]
    pub existential: bool,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            parameters: BTreeMap::new(),
            status: Status::Pass,
            witnesses: Vec::new(),
            existential: false,
        }
    }

    pub fn existential(mut self) -> Self {
        self.existential = true;
        self
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    /// Informational checks never affect the exit status.
    pub fn informational(self) -> Self {
        self.param("informational", true)
    }

    pub fn is_informational(&self) -> bool {
        self.parameters.get("informational") == Some(&Value::Bool(true))
    }

    pub fn witness(&mut self, w: Value) {
        self.witnesses.push(w);
    }

    pub fn fail(&mut self) {
        self.status = Status::Fail;
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}
