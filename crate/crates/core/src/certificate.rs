//! The structured record emitted by every check.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::rational::{self, Rational};

/// One finite, checkable claim: what was run, on which parameters, what was
/// concluded, and the data that lets a reader re-check it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub operation: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdict: String,
    pub passed: bool,
    pub witnesses: BTreeMap<String, Value>,
}

/// JSON string `"p/q"` for a rational.
pub fn rational_value(value: &Rational) -> Value {
    Value::String(rational::format(value))
}

impl Certificate {
    pub fn new(operation: &str) -> Self {
        Self {
            operation: operation.to_string(),
            parameters: BTreeMap::new(),
            verdict: String::new(),
            passed: false,
            witnesses: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    pub fn param_rational(self, key: &str, value: &Rational) -> Self {
        self.param(key, rational::format(value))
    }

    pub fn witness(mut self, key: &str, value: impl Serialize) -> Self {
        self.witnesses.insert(key.to_string(), to_value(value));
        self
    }

    pub fn witness_rational(self, key: &str, value: &Rational) -> Self {
        self.witness(key, rational::format(value))
    }

    pub fn verdict(mut self, verdict: &str, passed: bool) -> Self {
        self.verdict = verdict.to_string();
        self.passed = passed;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("certificate fields serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn fields_are_ordered_and_exact() {
        let cert = Certificate::new("demo")
            .param("z", 1)
            .param_rational("a", &rat(2, 4))
            .witness_rational("distance", &rat(1, 3))
            .verdict("Holds", true);
        let json = cert.to_json();
        assert!(json.find("\"a\"").unwrap() < json.find("\"z\"").unwrap());
        assert!(json.contains("\"1/2\""));
        assert!(json.contains("\"1/3\""));
    }
}
