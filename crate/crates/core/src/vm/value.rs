use std::collections::BTreeMap;
use std::fmt;

use primitive_types::{H160, U256};

use crate::lang::{Address, ScalarType, TypeTag};

/// A runtime value. Containers carry their element types so defaults can be
/// produced for absent entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Uint(U256),
    Bool(bool),
    Addr(Address),
    Array {
        elem: ScalarType,
        items: Vec<Value>,
    },
    /// Keys are stored as 256-bit words; address keys are zero-extended.
    Map {
        key: ScalarType,
        value: TypeTag,
        entries: BTreeMap<U256, Value>,
    },
}

impl Value {
    pub fn default_scalar(ty: ScalarType) -> Value {
        match ty {
            ScalarType::Uint => Value::Uint(U256::zero()),
            ScalarType::Bool => Value::Bool(false),
            ScalarType::Address => Value::Addr(H160::zero()),
        }
    }

    pub fn default_of(ty: &TypeTag) -> Value {
        match ty {
            TypeTag::Scalar(s) => Value::default_scalar(*s),
            TypeTag::Array(elem) => Value::Array {
                elem: *elem,
                items: Vec::new(),
            },
            TypeTag::Map(key, value) => Value::Map {
                key: *key,
                value: (**value).clone(),
                entries: BTreeMap::new(),
            },
        }
    }

    /// True for zero scalars and maps whose entries are all default.
    /// Arrays are never default: their length is observable.
    pub fn is_default(&self) -> bool {
        match self {
            Value::Uint(v) => v.is_zero(),
            Value::Bool(b) => !b,
            Value::Addr(a) => a.is_zero(),
            Value::Array { .. } => false,
            Value::Map { entries, .. } => entries.values().all(Value::is_default),
        }
    }

    pub fn scalar_type(&self) -> Option<ScalarType> {
        match self {
            Value::Uint(_) => Some(ScalarType::Uint),
            Value::Bool(_) => Some(ScalarType::Bool),
            Value::Addr(_) => Some(ScalarType::Address),
            _ => None,
        }
    }

    /// The value as a 256-bit word; addresses are zero-extended.
    pub fn as_word(&self) -> Option<U256> {
        match self {
            Value::Uint(v) => Some(*v),
            Value::Addr(a) => Some(addr_to_word(a)),
            Value::Bool(b) => Some(U256::from(*b as u8)),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Converts between `uint256` and `address`; other types pass through.
    pub fn coerce(self, ty: ScalarType) -> Value {
        match (self, ty) {
            (Value::Addr(a), ScalarType::Uint) => Value::Uint(addr_to_word(&a)),
            (Value::Uint(v), ScalarType::Address) => Value::Addr(word_to_addr(v)),
            (v, _) => v,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Uint(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Addr(a) => write!(f, "{}", fmt_addr(a)),
            Value::Array { items, .. } => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Map { entries, .. } => write!(f, "<map with {} entries>", entries.len()),
        }
    }
}

pub fn addr_to_word(a: &Address) -> U256 {
    U256::from_big_endian(a.as_bytes())
}

/// Keeps the low 160 bits.
pub fn word_to_addr(v: U256) -> Address {
    H160::from_slice(&v.to_big_endian()[12..])
}

pub fn fmt_addr(a: &Address) -> String {
    format!("0x{}", hex::encode(a.as_bytes()))
}

/// Parses a decimal or `0x`-prefixed hexadecimal integer.
pub fn parse_uint(s: &str) -> Option<U256> {
    let s = s.trim();
    if let Some(h) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        if h.is_empty() || h.len() > 64 {
            return None;
        }
        U256::from_str_radix(h, 16).ok()
    } else if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
        U256::from_dec_str(s).ok()
    } else {
        None
    }
}

/// Parses a `0x` address of exactly 40 hex digits.
pub fn parse_addr(s: &str) -> Option<Address> {
    let h = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X"))?;
    if h.len() != 40 {
        return None;
    }
    let bytes = hex::decode(h).ok()?;
    Some(H160::from_slice(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uint_parsing() {
        assert_eq!(parse_uint("42"), Some(U256::from(42)));
        assert_eq!(parse_uint("0x2a"), Some(U256::from(42)));
        assert_eq!(parse_uint("-1"), None);
        assert_eq!(parse_uint("0x"), None);
        assert_eq!(parse_uint(""), None);
    }

    #[test]
    fn address_word_round_trip() {
        let a = parse_addr("0x00000000000000000000000000000000000000ff").unwrap();
        assert_eq!(addr_to_word(&a), U256::from(255));
        assert_eq!(word_to_addr(U256::from(255)), a);
        assert!(parse_addr("0xff").is_none());
    }

    #[test]
    fn defaults() {
        let ty = TypeTag::Map(
            ScalarType::Address,
            Box::new(TypeTag::Map(
                ScalarType::Address,
                Box::new(TypeTag::Scalar(ScalarType::Uint)),
            )),
        );
        let mut v = Value::default_of(&ty);
        assert!(v.is_default());
        if let Value::Map { entries, value, .. } = &mut v {
            entries.insert(U256::one(), Value::default_of(value));
        }
        assert!(v.is_default());
        assert!(!Value::default_of(&TypeTag::Array(ScalarType::Uint)).is_default());
    }
}
