//! Scenario files and concrete event generation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use primitive_types::{H160, U256};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value as Json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::effects::{self, ORACLE};
use crate::lang::{harvest_constants, Address, ContractDef, FunctionDef, ScalarType};
use crate::vm::{fmt_addr, parse_addr, parse_uint, state_from_json, Event, Message, SnapshotError, Value, WorldState};

/// A 256-bit integer written as a decimal or `0x` string, or a JSON number.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Uint(pub U256);

impl<'de> Deserialize<'de> for Uint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = Json::deserialize(d)?;
        let v = match &j {
            Json::String(s) => parse_uint(s),
            Json::Number(n) => n.as_u64().map(U256::from),
            _ => None,
        };
        v.map(Uint)
            .ok_or_else(|| serde::de::Error::custom(format!("expected an unsigned integer, got {j}")))
    }
}

impl Serialize for Uint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub address: Option<String>,
    #[serde(default)]
    pub balance: Uint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExplicitCall {
    Args(Vec<Json>),
    Full {
        args: Vec<Json>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sender: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<Uint>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "three")]
    pub events_per_hb_pair: usize,
    #[serde(default = "one")]
    pub events_per_other_fn: usize,
    #[serde(default)]
    pub per_function: BTreeMap<String, usize>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            events_per_hb_pair: 3,
            events_per_other_fn: 1,
            per_function: BTreeMap::new(),
        }
    }
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn three() -> usize {
    3
}
fn six() -> usize {
    6
}
fn yes() -> bool {
    true
}
fn default_oracle() -> String {
    "oracle".into()
}
fn default_values() -> Vec<Uint> {
    vec![Uint(U256::zero())]
}
fn default_results() -> Vec<Json> {
    vec![Json::String("0".into())]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub actors: Vec<ActorSpec>,
    /// Name of the account that delivers oracle callbacks.
    #[serde(default = "default_oracle")]
    pub oracle: String,
    #[serde(default = "default_values")]
    pub value_domain: Vec<Uint>,
    /// Extra integer candidates on top of the harvested ones.
    #[serde(default)]
    pub constants: Vec<Uint>,
    /// Whether literals found in the contract join the integer domain.
    #[serde(default = "yes")]
    pub harvest: bool,
    #[serde(default)]
    pub per_function: BTreeMap<String, Vec<ExplicitCall>>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub timestamp: Uint,
    #[serde(default)]
    pub blocknumber: Uint,
    #[serde(default = "six")]
    pub max_trace_len: usize,
    #[serde(default = "two")]
    pub min_trace_len: usize,
    /// One entry per callback reply; an array when `__callback` takes
    /// several result parameters.
    #[serde(default = "default_results")]
    pub callback_results: Vec<Json>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Json>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("no candidate values for parameter `{param}` of `{func}`")]
    EmptyDomain { func: String, param: String },
    #[error("budget for `{0}` is zero")]
    BudgetZero(String),
    #[error("`{func}`: {message}")]
    BadCall { func: String, message: String },
    #[error("initial state: {0}")]
    Snapshot(#[from] SnapshotError),
}

impl Scenario {
    pub fn from_json(j: &Json) -> Result<Scenario, ScenarioError> {
        let sc: Scenario =
            serde_json::from_value(j.clone()).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.actors.is_empty() {
            return Err(ScenarioError::Invalid("at least one actor is required".into()));
        }
        if self.min_trace_len < 2 || self.max_trace_len < self.min_trace_len {
            return Err(ScenarioError::Invalid(format!(
                "trace lengths must satisfy 2 <= min ({}) <= max ({})",
                self.min_trace_len, self.max_trace_len
            )));
        }
        if self.budgets.events_per_hb_pair == 0 {
            return Err(ScenarioError::BudgetZero("events_per_hb_pair".into()));
        }
        if self.budgets.events_per_other_fn == 0 {
            return Err(ScenarioError::BudgetZero("events_per_other_fn".into()));
        }
        if let Some((f, _)) = self.budgets.per_function.iter().find(|(_, b)| **b == 0) {
            return Err(ScenarioError::BudgetZero(f.clone()));
        }
        let mut names = BTreeSet::new();
        for a in self.actors.iter().map(|a| &a.name).chain([&self.oracle]) {
            if !names.insert(a) {
                return Err(ScenarioError::Invalid(format!("duplicate account name `{a}`")));
            }
        }
        Ok(())
    }

    pub fn accounts(&self) -> Result<Accounts, ScenarioError> {
        let mut named = Vec::new();
        for a in &self.actors {
            let addr = match &a.address {
                Some(s) => parse_addr(s).ok_or_else(|| {
                    ScenarioError::Invalid(format!("actor `{}`: bad address `{s}`", a.name))
                })?,
                None => derive_address(&a.name),
            };
            named.push((a.name.clone(), addr));
        }
        let oracle = derive_address(&self.oracle);
        let accounts = Accounts {
            actors: named,
            oracle: (self.oracle.clone(), oracle),
        };
        let distinct: BTreeSet<Address> = accounts.all().map(|(_, a)| a).collect();
        if distinct.len() != self.actors.len() + 1 {
            return Err(ScenarioError::Invalid("two accounts share an address".into()));
        }
        Ok(accounts)
    }

    /// The starting state: the embedded snapshot, or `snapshot` when given,
    /// with actor balances filled in where the snapshot is silent.
    pub fn initial_state(
        &self,
        c: &ContractDef,
        snapshot: Option<&Json>,
    ) -> Result<WorldState, ScenarioError> {
        let accounts = self.accounts()?;
        let resolve = |n: &str| accounts.lookup(n);
        let mut s = match snapshot.or(self.initial_state.as_ref()) {
            Some(j) => state_from_json(c, j, &resolve)?,
            None => WorldState::initial(c),
        };
        for (a, (_, addr)) in self.actors.iter().zip(&accounts.actors) {
            s.ext_balances.entry(*addr).or_insert(a.balance.0);
        }
        Ok(s)
    }
}

/// Derived address of a named account: the first 20 bytes of sha256(name).
pub fn derive_address(name: &str) -> Address {
    H160::from_slice(&Sha256::digest(name.as_bytes())[..20])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accounts {
    pub actors: Vec<(String, Address)>,
    pub oracle: (String, Address),
}

impl Accounts {
    pub fn all(&self) -> impl Iterator<Item = (&str, Address)> {
        self.actors
            .iter()
            .chain([&self.oracle])
            .map(|(n, a)| (n.as_str(), *a))
    }

    pub fn lookup(&self, name: &str) -> Option<Address> {
        self.all().find(|(n, _)| *n == name).map(|(_, a)| a)
    }

    pub fn name_of(&self, a: &Address) -> Option<&str> {
        self.all().find(|(_, x)| x == a).map(|(n, _)| n)
    }

    /// Actor name if known, hex otherwise.
    pub fn label(&self, a: &Address) -> String {
        self.name_of(a).map(str::to_string).unwrap_or_else(|| fmt_addr(a))
    }

    pub fn describe(&self, e: &Event) -> String {
        let args: Vec<String> = e
            .msg
            .args
            .iter()
            .map(|v| match v {
                Value::Addr(a) => self.label(a),
                other => other.to_string(),
            })
            .collect();
        let mut s = format!("{}({}) from {}", e.func, args.join(", "), self.label(&e.msg.sender));
        if !e.msg.value.is_zero() {
            s.push_str(&format!(" value {}", e.msg.value));
        }
        s
    }
}

impl fmt::Display for Accounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, a) in self.all() {
            writeln!(f, "{n}: {}", fmt_addr(&a))?;
        }
        Ok(())
    }
}

/// The concrete event set, indexed by position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSet {
    pub events: Vec<Event>,
}

/// Builds the event set for every non-pure function, in declaration order.
///
/// Explicit calls come first, then the cartesian product of sender, value
/// and argument domains (sender varies slowest), deduplicated and cut at the
/// function's budget. `__callback` events are produced for each query id the
/// generated calls can issue, times each scenario result, and are not
/// budgeted. `fallback` gets one event per actor.
pub fn generate_events(
    c: &ContractDef,
    sc: &Scenario,
    s0: &WorldState,
) -> Result<EventSet, ScenarioError> {
    sc.validate()?;
    let accounts = sc.accounts()?;
    let pure = effects::pure_events_filter(c);
    let cands = effects::hb_candidate_pairs(c);
    let in_pair: BTreeSet<&str> = cands
        .iter()
        .flat_map(|(a, b)| [a.as_str(), b.as_str()])
        .collect();
    for name in sc.per_function.keys().chain(sc.budgets.per_function.keys()) {
        if c.function(name).is_none() {
            return Err(ScenarioError::Invalid(format!("unknown function `{name}`")));
        }
    }

    let mut uints: BTreeSet<U256> = sc.constants.iter().map(|u| u.0).collect();
    if sc.harvest {
        uints.extend(harvest_constants(c).uints);
    }
    let ctx = Ctx {
        sc,
        accounts: &accounts,
        uints: uints.into_iter().collect(),
    };

    let mut events = Vec::new();
    let mut issuers = 0usize;
    for f in &c.functions {
        if pure.contains(&f.name) || f.name == crate::CALLBACK_FN {
            continue;
        }
        let budget = sc.budgets.per_function.get(&f.name).copied().unwrap_or(
            if in_pair.contains(f.name.as_str()) {
                sc.budgets.events_per_hb_pair
            } else {
                sc.budgets.events_per_other_fn
            },
        );
        let mine = if f.name == crate::FALLBACK_FN && !sc.per_function.contains_key(&f.name) {
            accounts
                .actors
                .iter()
                .map(|(_, a)| ctx.event(f, *a, U256::zero(), Vec::new()))
                .collect()
        } else {
            ctx.function_events(f, budget)?
        };
        if effects::rw_set(f).writes.contains(ORACLE) {
            issuers += mine.len();
        }
        events.extend(mine);
    }

    if let Some(cb) = c.function(crate::CALLBACK_FN) {
        if !pure.contains(&cb.name) {
            events.extend(ctx.callback_events(cb, s0.next_qid, issuers)?);
        }
    }
    Ok(EventSet { events })
}

struct Ctx<'a> {
    sc: &'a Scenario,
    accounts: &'a Accounts,
    uints: Vec<U256>,
}

impl Ctx<'_> {
    fn event(&self, f: &FunctionDef, sender: Address, value: U256, args: Vec<Value>) -> Event {
        Event {
            func: f.name.clone(),
            msg: Message {
                sender,
                value,
                args,
                timestamp: self.sc.timestamp.0,
                blocknumber: self.sc.blocknumber.0,
            },
        }
    }

    fn bad(&self, f: &FunctionDef, message: String) -> ScenarioError {
        ScenarioError::BadCall {
            func: f.name.clone(),
            message,
        }
    }

    fn senders(&self) -> Vec<Address> {
        self.accounts.actors.iter().map(|(_, a)| *a).collect()
    }

    fn values(&self, f: &FunctionDef) -> Result<Vec<U256>, ScenarioError> {
        if !f.payable {
            return Ok(vec![U256::zero()]);
        }
        if self.sc.value_domain.is_empty() {
            return Err(ScenarioError::EmptyDomain {
                func: f.name.clone(),
                param: "msg.value".into(),
            });
        }
        Ok(self.sc.value_domain.iter().map(|u| u.0).collect())
    }

    fn arg(&self, f: &FunctionDef, ty: ScalarType, j: &Json) -> Result<Value, ScenarioError> {
        let v = match ty {
            ScalarType::Uint => match j {
                Json::String(s) => parse_uint(s).map(Value::Uint),
                Json::Number(n) => n.as_u64().map(|n| Value::Uint(U256::from(n))),
                _ => None,
            },
            ScalarType::Bool => j.as_bool().map(Value::Bool),
            ScalarType::Address => j
                .as_str()
                .and_then(|s| parse_addr(s).or_else(|| self.accounts.lookup(s)))
                .map(Value::Addr),
        };
        v.ok_or_else(|| self.bad(f, format!("`{j}` is not a valid {ty}")))
    }

    fn args(&self, f: &FunctionDef, params: &[ScalarType], raw: &[Json]) -> Result<Vec<Value>, ScenarioError> {
        if raw.len() != params.len() {
            return Err(self.bad(
                f,
                format!("expected {} arguments, got {}", params.len(), raw.len()),
            ));
        }
        params
            .iter()
            .zip(raw)
            .map(|(ty, j)| self.arg(f, *ty, j))
            .collect()
    }

    fn domain(&self, f: &FunctionDef, i: usize) -> Result<Vec<Value>, ScenarioError> {
        let p = &f.params[i];
        let d: Vec<Value> = match p.ty {
            ScalarType::Uint => self.uints.iter().map(|v| Value::Uint(*v)).collect(),
            ScalarType::Bool => vec![Value::Bool(false), Value::Bool(true)],
            ScalarType::Address => self.senders().into_iter().map(Value::Addr).collect(),
        };
        if d.is_empty() {
            return Err(ScenarioError::EmptyDomain {
                func: f.name.clone(),
                param: p.name.clone(),
            });
        }
        Ok(d)
    }

    fn explicit(&self, f: &FunctionDef, default_sender: &[Address]) -> Result<Vec<Event>, ScenarioError> {
        let params: Vec<ScalarType> = f.params.iter().map(|p| p.ty).collect();
        let mut out = Vec::new();
        for call in self.sc.per_function.get(&f.name).into_iter().flatten() {
            let (raw, sender, value) = match call {
                ExplicitCall::Args(a) => (a, None, None),
                ExplicitCall::Full {
                    args,
                    sender,
                    value,
                } => (args, sender.as_ref(), *value),
            };
            let args = self.args(f, &params, raw)?;
            let senders = match sender {
                Some(s) => vec![parse_addr(s)
                    .or_else(|| self.accounts.lookup(s))
                    .ok_or_else(|| self.bad(f, format!("unknown sender `{s}`")))?],
                None => default_sender.to_vec(),
            };
            let values = match value {
                Some(v) => vec![v.0],
                None => self.values(f)?,
            };
            for s in &senders {
                for v in &values {
                    out.push(self.event(f, *s, *v, args.clone()));
                }
            }
        }
        Ok(out)
    }

    fn function_events(&self, f: &FunctionDef, budget: usize) -> Result<Vec<Event>, ScenarioError> {
        let mut out: Vec<Event> = Vec::new();
        let push = |e: Event, out: &mut Vec<Event>| {
            if out.len() < budget && !out.contains(&e) {
                out.push(e);
            }
        };
        for e in self.explicit(f, &self.senders())? {
            push(e, &mut out);
        }
        if out.len() >= budget {
            return Ok(out);
        }
        let domains = (0..f.params.len())
            .map(|i| self.domain(f, i))
            .collect::<Result<Vec<_>, _>>()?;
        let values = self.values(f)?;
        'outer: for sender in self.senders() {
            for v in &values {
                let mut odo = vec![0usize; domains.len()];
                loop {
                    let args = odo.iter().zip(&domains).map(|(i, d)| d[*i].clone()).collect();
                    push(self.event(f, sender, *v, args), &mut out);
                    if out.len() >= budget {
                        break 'outer;
                    }
                    if !advance(&mut odo, &domains) {
                        break;
                    }
                }
            }
        }
        Ok(out)
    }

    fn callback_args(&self, cb: &FunctionDef) -> Result<Vec<Vec<Value>>, ScenarioError> {
        let rest: Vec<ScalarType> = cb.params[1..].iter().map(|p| p.ty).collect();
        if rest.is_empty() {
            return Ok(vec![Vec::new()]);
        }
        let mut results = Vec::new();
        for r in &self.sc.callback_results {
            let raw = match r {
                Json::Array(items) => items.clone(),
                single => vec![single.clone()],
            };
            let args = self.args(cb, &rest, &raw)?;
            if !results.contains(&args) {
                results.push(args);
            }
        }
        if results.is_empty() {
            return Err(ScenarioError::EmptyDomain {
                func: cb.name.clone(),
                param: cb.params[1].name.clone(),
            });
        }
        Ok(results)
    }

    fn callback_events(
        &self,
        cb: &FunctionDef,
        first_qid: U256,
        issuers: usize,
    ) -> Result<Vec<Event>, ScenarioError> {
        let oracle = self.accounts.oracle.1;
        if self.sc.per_function.contains_key(&cb.name) {
            return self.explicit(cb, &[oracle]);
        }
        let results = self.callback_args(cb)?;
        let mut out = Vec::new();
        let mut qid = first_qid;
        for _ in 0..issuers {
            for r in &results {
                let mut args = vec![Value::Uint(qid)];
                args.extend(r.iter().cloned());
                let e = self.event(cb, oracle, U256::zero(), args);
                if !out.contains(&e) {
                    out.push(e);
                }
            }
            qid = qid.overflowing_add(U256::one()).0;
        }
        Ok(out)
    }
}

/// Parsed `callback_results`: the arguments that follow the query id, one
/// vector per reply. A callback with no result parameters gets one empty reply.
pub fn callback_results(c: &ContractDef, sc: &Scenario) -> Result<Vec<Vec<Value>>, ScenarioError> {
    let Some(cb) = c.function(crate::CALLBACK_FN) else {
        return Ok(Vec::new());
    };
    let accounts = sc.accounts()?;
    let ctx = Ctx {
        sc,
        accounts: &accounts,
        uints: Vec::new(),
    };
    ctx.callback_args(cb)
}

/// Odometer step, last position fastest. False once every tuple was visited.
fn advance(odo: &mut [usize], domains: &[Vec<Value>]) -> bool {
    for i in (0..odo.len()).rev() {
        odo[i] += 1;
        if odo[i] < domains[i].len() {
            return true;
        }
        odo[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use serde_json::json;

    fn scenario(j: Json) -> Scenario {
        Scenario::from_json(&j).unwrap()
    }

    #[test]
    fn nullary_function_budget_one() {
        let c = parse("contract C { uint256 x; function f() { x = 1; } }").unwrap();
        let sc = scenario(json!({ "actors": [{ "name": "A" }, { "name": "B" }] }));
        let s0 = sc.initial_state(&c, None).unwrap();
        let es = generate_events(&c, &sc, &s0).unwrap();
        assert_eq!(es.events.len(), 1);
        assert_eq!(es.events[0].msg.sender, derive_address("A"));
    }

    #[test]
    fn explicit_first_then_cartesian() {
        let c = parse(
            "contract C { mapping(address => uint256) m; function f(address a, uint256 v) { m[a] = v; } }",
        )
        .unwrap();
        let sc = scenario(json!({
            "actors": [{ "name": "A" }, { "name": "B" }],
            "harvest": false,
            "constants": ["7"],
            "per_function": { "f": [{ "args": ["B", "9"], "sender": "A" }] },
            "budgets": { "per_function": { "f": 3 } }
        }));
        let s0 = sc.initial_state(&c, None).unwrap();
        let acc = sc.accounts().unwrap();
        let es = generate_events(&c, &sc, &s0).unwrap();
        let shown: Vec<String> = es.events.iter().map(|e| acc.describe(e)).collect();
        assert_eq!(shown, vec!["f(B, 9) from A", "f(A, 7) from A", "f(B, 7) from A"]);
    }

    #[test]
    fn pure_functions_produce_nothing() {
        let c = parse("contract C { uint256 x; function p(uint256 a) { uint256 b = a; } function f() { x = 1; } }")
            .unwrap();
        let sc = scenario(json!({ "actors": [{ "name": "A" }] }));
        let s0 = sc.initial_state(&c, None).unwrap();
        let es = generate_events(&c, &sc, &s0).unwrap();
        assert!(es.events.iter().all(|e| e.func == "f"));
    }

    #[test]
    fn callbacks_cover_issued_ids() {
        let c = parse(
            r#"contract K {
                mapping(uint256 => address) who;
                function ask() payable { uint256 q = oracle_query(); who[q] = msg.sender; }
                function __callback(uint256 id, uint256 r) { who[id] = 0x0000000000000000000000000000000000000000; }
            }"#,
        )
        .unwrap();
        let sc = scenario(json!({
            "actors": [{ "name": "A", "balance": 5 }, { "name": "B", "balance": "5" }],
            "value_domain": ["1"],
            "callback_results": ["0", "3"],
            "budgets": { "per_function": { "ask": 2 } }
        }));
        let s0 = sc.initial_state(&c, None).unwrap();
        let acc = sc.accounts().unwrap();
        let es = generate_events(&c, &sc, &s0).unwrap();
        let shown: Vec<String> = es.events.iter().map(|e| acc.describe(e)).collect();
        assert_eq!(
            shown,
            vec![
                "ask() from A value 1",
                "ask() from B value 1",
                "__callback(1, 0) from oracle",
                "__callback(1, 3) from oracle",
                "__callback(2, 0) from oracle",
                "__callback(2, 3) from oracle",
            ]
        );
        assert_eq!(s0.ext_balance(&derive_address("B")), U256::from(5));
    }

    #[test]
    fn fallback_one_per_actor() {
        let c = parse("contract C { uint256 n; function fallback() { n += 1; } }").unwrap();
        let sc = scenario(json!({ "actors": [{ "name": "A" }, { "name": "B" }] }));
        let s0 = sc.initial_state(&c, None).unwrap();
        assert_eq!(generate_events(&c, &sc, &s0).unwrap().events.len(), 2);
    }

    #[test]
    fn deterministic() {
        let c = parse(
            "contract C { mapping(uint256 => bool) m; function f(uint256 a, bool b) { m[a] = b; } function g(uint256 a) { m[a] = !m[a]; } }",
        )
        .unwrap();
        let sc = scenario(json!({ "actors": [{ "name": "A" }], "budgets": { "events_per_hb_pair": 4 } }));
        let s0 = sc.initial_state(&c, None).unwrap();
        let a = generate_events(&c, &sc, &s0).unwrap();
        let b = generate_events(&c, &sc, &s0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.events.iter().filter(|e| e.func == "f").count(), 4);
    }

    #[test]
    fn errors() {
        let c = parse("contract C { uint256 x; function f() payable { x = msg.value; } }").unwrap();
        assert!(Scenario::from_json(&json!({ "actors": [] })).is_err());
        assert!(matches!(
            Scenario::from_json(&json!({ "actors": [{ "name": "A" }], "budgets": { "events_per_hb_pair": 0 } })),
            Err(ScenarioError::BudgetZero(_))
        ));
        assert!(Scenario::from_json(&json!({ "actors": [{ "name": "A" }], "max_trace_len": 1 })).is_err());
        let sc = scenario(json!({ "actors": [{ "name": "A" }], "value_domain": [] }));
        let s0 = sc.initial_state(&c, None).unwrap();
        assert!(matches!(
            generate_events(&c, &sc, &s0),
            Err(ScenarioError::EmptyDomain { .. })
        ));
    }
}
