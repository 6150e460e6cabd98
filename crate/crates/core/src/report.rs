//! Pass/fail outcomes of identity checks, with witnesses and the truncation
//! bounds they relied on, and their JSON form.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::multivar::{Comparison, Witness};

/// The outcome of one identity check.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Check {
    pub pass: bool,
    pub witness: Option<Value>,
    pub bounds: Map<String, Value>,
}

impl Check {
    pub fn passed() -> Self {
        Check {
            pass: true,
            ..Default::default()
        }
    }

    pub fn failed(witness: Value) -> Self {
        Check {
            pass: false,
            witness: Some(witness),
            bounds: Map::new(),
        }
    }

    pub fn from_comparison(c: &Comparison, what: &str) -> Self {
        match c {
            Comparison::Equal => Check::passed(),
            Comparison::Differ { z, v, left, right } => Check::failed(json!({
                "check": what,
                "z": z.0,
                "v_power": v,
                "left": left.to_string(),
                "right": right.to_string(),
            })),
        }
    }

    pub fn from_witness(w: Option<&Witness>, what: &str) -> Self {
        match w {
            None => Check::passed(),
            Some(w) => Check::failed(witness_json(w, what)),
        }
    }

    pub fn bound(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.bounds.insert(key.into(), v.into());
        self
    }

    /// Both must pass; the first failure's witness is kept and bounds merge.
    pub fn and(mut self, other: Check) -> Self {
        if self.pass && !other.pass {
            self.witness = other.witness;
        }
        self.pass &= other.pass;
        self.bounds.extend(other.bounds);
        self
    }
}

pub fn witness_json(w: &Witness, what: &str) -> Value {
    json!({
        "check": what,
        "v": w.point.v.to_string(),
        "z": w.point.z().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "left": w.left.to_string(),
        "right": w.right.to_string(),
    })
}

/// The JSON report `{"identity", "params", "pass", "witness", "truncation_bounds"}`.
pub fn report_json(identity: &str, params: Value, check: &Check) -> Value {
    json!({
        "identity": identity,
        "params": params,
        "pass": check.pass,
        "witness": check.witness,
        "truncation_bounds": Value::Object(check.bounds.clone()),
    })
}
