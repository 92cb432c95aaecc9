//! JSON snapshots of a [`WorldState`].
//!
//! ```json
//! { "fields": { "balances": { "O": "100" } }, "balance": "0x10",
//!   "ext_balances": { "O": "5" }, "next_qid": "1" }
//! ```
//!
//! Integers are decimal strings, `0x` hex strings or JSON numbers. Addresses
//! are 40-digit hex strings or names understood by the caller's resolver.
//! Every key is optional; missing fields take their default values.

use serde_json::{Map as JsonMap, Value as Json};
use thiserror::Error;

use primitive_types::U256;

use super::output::value_json;
use super::state::WorldState;
use super::value::{addr_to_word, fmt_addr, parse_addr, parse_uint, Value};
use crate::lang::{Address, ContractDef, ScalarType, TypeTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnapshotError {
    #[error("snapshot must be a JSON object")]
    NotAnObject,
    #[error("unknown snapshot key `{0}`")]
    UnknownKey(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("at `{path}`: expected {expected}")]
    BadValue { path: String, expected: String },
}

/// Loads a snapshot on top of [`WorldState::initial`].
pub fn state_from_json(
    c: &ContractDef,
    j: &Json,
    resolve: &dyn Fn(&str) -> Option<Address>,
) -> Result<WorldState, SnapshotError> {
    let obj = j.as_object().ok_or(SnapshotError::NotAnObject)?;
    let mut s = WorldState::initial(c);
    let r = Reader { resolve };
    for (k, v) in obj {
        match k.as_str() {
            "fields" => {
                let fields = v.as_object().ok_or_else(|| bad("fields", "an object"))?;
                for (name, fv) in fields {
                    let decl = c
                        .field(name)
                        .ok_or_else(|| SnapshotError::UnknownField(name.clone()))?;
                    s.fields.insert(name.clone(), r.value(&decl.ty, fv, name)?);
                }
            }
            "balance" => s.balance = r.uint(v, "balance")?,
            "ext_balances" => {
                let m = v.as_object().ok_or_else(|| bad("ext_balances", "an object"))?;
                for (who, amount) in m {
                    let path = format!("ext_balances.{who}");
                    let a = r.address_str(who, &path)?;
                    s.ext_balances.insert(a, r.uint(amount, &path)?);
                }
            }
            "next_qid" => s.next_qid = r.uint(v, "next_qid")?,
            other => return Err(SnapshotError::UnknownKey(other.to_string())),
        }
    }
    Ok(s)
}

/// Serialises fields, balances and the query counter. Pending queries and
/// the transfer log are not part of a snapshot.
pub fn state_to_json(s: &WorldState) -> Json {
    let mut fields = JsonMap::new();
    for (name, v) in &s.fields {
        fields.insert(name.clone(), value_json(v));
    }
    let mut ext = JsonMap::new();
    for (a, v) in &s.ext_balances {
        ext.insert(fmt_addr(a), Json::String(v.to_string()));
    }
    let mut root = JsonMap::new();
    root.insert("fields".into(), Json::Object(fields));
    root.insert("balance".into(), Json::String(s.balance.to_string()));
    root.insert("ext_balances".into(), Json::Object(ext));
    root.insert("next_qid".into(), Json::String(s.next_qid.to_string()));
    Json::Object(root)
}

fn bad(path: &str, expected: &str) -> SnapshotError {
    SnapshotError::BadValue {
        path: path.to_string(),
        expected: expected.to_string(),
    }
}

struct Reader<'a> {
    resolve: &'a dyn Fn(&str) -> Option<Address>,
}

impl Reader<'_> {
    fn uint(&self, j: &Json, path: &str) -> Result<U256, SnapshotError> {
        let v = match j {
            Json::String(s) => parse_uint(s),
            Json::Number(n) => n.as_u64().map(U256::from),
            _ => None,
        };
        v.ok_or_else(|| bad(path, "an unsigned integer"))
    }

    fn address_str(&self, s: &str, path: &str) -> Result<Address, SnapshotError> {
        parse_addr(s)
            .or_else(|| (self.resolve)(s))
            .ok_or_else(|| bad(path, "a 40-digit hex address or a known actor name"))
    }

    fn scalar(&self, ty: ScalarType, j: &Json, path: &str) -> Result<Value, SnapshotError> {
        Ok(match ty {
            ScalarType::Uint => Value::Uint(self.uint(j, path)?),
            ScalarType::Bool => Value::Bool(j.as_bool().ok_or_else(|| bad(path, "a bool"))?),
            ScalarType::Address => {
                let s = j.as_str().ok_or_else(|| bad(path, "an address string"))?;
                Value::Addr(self.address_str(s, path)?)
            }
        })
    }

    fn key(&self, ty: ScalarType, k: &str, path: &str) -> Result<U256, SnapshotError> {
        match ty {
            ScalarType::Address => Ok(addr_to_word(&self.address_str(k, path)?)),
            _ => parse_uint(k).ok_or_else(|| bad(path, "an unsigned integer key")),
        }
    }

    fn value(&self, ty: &TypeTag, j: &Json, path: &str) -> Result<Value, SnapshotError> {
        match ty {
            TypeTag::Scalar(s) => self.scalar(*s, j, path),
            TypeTag::Array(elem) => {
                let items = j.as_array().ok_or_else(|| bad(path, "an array"))?;
                let items = items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| self.scalar(*elem, v, &format!("{path}[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Value::Array { elem: *elem, items })
            }
            TypeTag::Map(key, value) => {
                let obj = j.as_object().ok_or_else(|| bad(path, "an object"))?;
                let mut entries = std::collections::BTreeMap::new();
                for (k, v) in obj {
                    let sub = format!("{path}[{k}]");
                    entries.insert(self.key(*key, k, &sub)?, self.value(value, v, &sub)?);
                }
                Ok(Value::Map {
                    key: *key,
                    value: (**value).clone(),
                    entries,
                })
            }
        }
    }
}
