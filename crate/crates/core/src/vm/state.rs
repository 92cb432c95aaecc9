use std::collections::BTreeMap;

use primitive_types::U256;

use super::value::Value;
use crate::lang::{Address, ContractDef};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingQuery {
    /// Position of the issuing event within the trace, when known.
    pub origin: Option<usize>,
    pub args: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub to: Address,
    pub amount: U256,
    pub succeeded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldState {
    pub fields: BTreeMap<String, Value>,
    pub balance: U256,
    pub ext_balances: BTreeMap<Address, U256>,
    pub pending_queries: BTreeMap<U256, PendingQuery>,
    pub next_qid: U256,
    pub transfer_log: Vec<Transfer>,
}

impl WorldState {
    /// Every field at its default value, zero balance, query ids from 1.
    pub fn initial(c: &ContractDef) -> WorldState {
        WorldState {
            fields: c
                .fields
                .iter()
                .map(|f| (f.name.clone(), Value::default_of(&f.ty)))
                .collect(),
            balance: U256::zero(),
            ext_balances: BTreeMap::new(),
            pending_queries: BTreeMap::new(),
            next_qid: U256::one(),
            transfer_log: Vec::new(),
        }
    }

    pub fn ext_balance(&self, a: &Address) -> U256 {
        self.ext_balances.get(a).copied().unwrap_or_default()
    }

    /// Contract balance plus all external balances, or `None` on overflow.
    pub fn total_ether(&self) -> Option<U256> {
        self.ext_balances
            .values()
            .try_fold(self.balance, |acc, v| acc.checked_add(*v))
    }
}
