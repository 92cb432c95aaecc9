use serde_json::{json, Map as JsonMap, Value as Json};
use sha2::{Digest, Sha256};

use super::state::WorldState;
use super::value::{fmt_addr, word_to_addr, Value};
use crate::lang::ScalarType;

/// Canonical serialisation of the observable contract state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Output {
    canonical: String,
}

impl Output {
    pub fn as_str(&self) -> &str {
        &self.canonical
    }

    pub fn to_json(&self) -> Json {
        serde_json::from_str(&self.canonical).expect("canonical output is valid JSON")
    }

    /// Hex sha256 of the canonical bytes.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical.as_bytes()))
    }
}

/// Contract fields and balance; the transfer log is added only on request.
/// Map entries holding default values are omitted.
pub fn output_of(s: &WorldState, include_transfers: bool) -> Output {
    let mut fields = JsonMap::new();
    for (name, v) in &s.fields {
        fields.insert(name.clone(), value_json(v));
    }
    let mut root = JsonMap::new();
    root.insert("balance".into(), Json::String(s.balance.to_string()));
    root.insert("fields".into(), Json::Object(fields));
    if include_transfers {
        let log: Vec<Json> = s
            .transfer_log
            .iter()
            .map(|t| {
                json!({
                    "to": fmt_addr(&t.to),
                    "amount": t.amount.to_string(),
                    "succeeded": t.succeeded,
                })
            })
            .collect();
        root.insert("transfers".into(), Json::Array(log));
    }
    Output {
        canonical: Json::Object(root).to_string(),
    }
}

pub(crate) fn scalar_json(v: &Value) -> Json {
    match v {
        Value::Uint(x) => Json::String(x.to_string()),
        Value::Bool(b) => Json::Bool(*b),
        Value::Addr(a) => Json::String(fmt_addr(a)),
        _ => unreachable!("not a scalar"),
    }
}

/// Map entries holding default values are skipped.
pub(crate) fn value_json(v: &Value) -> Json {
    match v {
        Value::Array { items, .. } => Json::Array(items.iter().map(scalar_json).collect()),
        Value::Map { key, entries, .. } => {
            let mut obj = JsonMap::new();
            for (k, v) in entries {
                if v.is_default() {
                    continue;
                }
                let k = match key {
                    ScalarType::Address => fmt_addr(&word_to_addr(*k)),
                    _ => k.to_string(),
                };
                obj.insert(k, value_json(v));
            }
            Json::Object(obj)
        }
        _ => scalar_json(v),
    }
}
