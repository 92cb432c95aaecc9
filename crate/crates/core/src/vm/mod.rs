//! Deterministic interpreter with per-event rollback.

mod interp;
mod output;
mod snapshot;
mod state;
mod value;

use std::fmt;

use primitive_types::U256;
use thiserror::Error;

use crate::lang::Address;

pub use interp::{exec_event, exec_trace, EventStatus, ExecMode, RunOutcome, TraceOutcome};
pub use output::{output_of, Output};
pub use snapshot::{state_from_json, state_to_json, SnapshotError};
pub use state::{PendingQuery, Transfer, WorldState};
pub use value::{addr_to_word, fmt_addr, parse_addr, parse_uint, word_to_addr, Value};

/// Transaction context of an event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    pub sender: Address,
    pub value: U256,
    pub args: Vec<Value>,
    pub timestamp: U256,
    pub blocknumber: U256,
}

/// A call to one contract function with a concrete message.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub func: String,
    pub msg: Message,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.func)?;
        for (i, a) in self.msg.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ") from {}", fmt_addr(&self.msg.sender))?;
        if !self.msg.value.is_zero() {
            write!(f, " value {}", self.msg.value)?;
        }
        Ok(())
    }
}

impl std::hash::Hash for Value {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Value::Uint(v) => v.hash(state),
            Value::Bool(b) => b.hash(state),
            Value::Addr(a) => a.hash(state),
            Value::Array { items, .. } => items.hash(state),
            Value::Map { entries, .. } => {
                for (k, v) in entries {
                    k.hash(state);
                    v.hash(state);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RevertReason {
    RequireFailed,
    ExplicitThrow,
    DivByZero,
    IndexOOB,
    NonPayableValue,
    LoopCap,
    /// The sender cannot cover `msg.value`.
    InsufficientFunds,
}

impl fmt::Display for RevertReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VmError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("function `{func}` expects {expected} arguments, got {got}")]
    Arity {
        func: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {index} of `{func}` has the wrong type")]
    ArgType { func: String, index: usize },
}

/// Maximum iterations of a single `for` loop.
pub const LOOP_CAP: usize = 10_000;
