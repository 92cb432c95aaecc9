use std::collections::HashMap;

use primitive_types::U256;

use super::state::{PendingQuery, Transfer, WorldState};
use super::value::{word_to_addr, Value};
use super::{Event, RevertReason, VmError, LOOP_CAP};
use crate::lang::{BinOp, ContractDef, Expr, FunctionDef, Stmt, TypeTag, UnOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Ok(WorldState),
    /// The caller's pre-state is left untouched.
    Revert(RevertReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Stop at the first revert.
    Strict,
    /// Skip reverting events and keep going.
    Tolerant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventStatus {
    Ok,
    Reverted(RevertReason),
    NotRun,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceOutcome {
    pub statuses: Vec<EventStatus>,
    /// Query ids issued by each event.
    pub issued: Vec<Vec<U256>>,
    pub final_state: WorldState,
    pub valid: bool,
}

pub fn exec_event(c: &ContractDef, s: &WorldState, e: &Event) -> Result<RunOutcome, VmError> {
    run(c, s, e, None)
}

pub fn exec_trace(
    c: &ContractDef,
    s0: &WorldState,
    trace: &[Event],
    mode: ExecMode,
) -> Result<TraceOutcome, VmError> {
    let mut state = s0.clone();
    let mut statuses = Vec::with_capacity(trace.len());
    let mut issued = Vec::with_capacity(trace.len());
    let mut valid = true;
    for (pos, e) in trace.iter().enumerate() {
        if !valid && mode == ExecMode::Strict {
            statuses.push(EventStatus::NotRun);
            issued.push(Vec::new());
            continue;
        }
        match run(c, &state, e, Some(pos))? {
            RunOutcome::Ok(next) => {
                issued.push(issued_between(&state, &next));
                state = next;
                statuses.push(EventStatus::Ok);
            }
            RunOutcome::Revert(r) => {
                valid = false;
                issued.push(Vec::new());
                statuses.push(EventStatus::Reverted(r));
            }
        }
    }
    Ok(TraceOutcome {
        statuses,
        issued,
        final_state: state,
        valid,
    })
}

fn issued_between(before: &WorldState, after: &WorldState) -> Vec<U256> {
    let mut out = Vec::new();
    let mut q = before.next_qid;
    while q < after.next_qid {
        out.push(q);
        q += U256::one();
    }
    out
}

fn check_args(f: &FunctionDef, e: &Event) -> Result<(), VmError> {
    if f.params.len() != e.msg.args.len() {
        return Err(VmError::Arity {
            func: f.name.clone(),
            expected: f.params.len(),
            got: e.msg.args.len(),
        });
    }
    for (i, (p, a)) in f.params.iter().zip(&e.msg.args).enumerate() {
        if a.scalar_type() != Some(p.ty) {
            return Err(VmError::ArgType {
                func: f.name.clone(),
                index: i,
            });
        }
    }
    Ok(())
}

fn run(
    c: &ContractDef,
    s: &WorldState,
    e: &Event,
    origin: Option<usize>,
) -> Result<RunOutcome, VmError> {
    let f = c
        .function(&e.func)
        .ok_or_else(|| VmError::UnknownFunction(e.func.clone()))?;
    check_args(f, e)?;

    let mut state = s.clone();
    let value = e.msg.value;
    if !value.is_zero() {
        if !f.payable {
            return Ok(RunOutcome::Revert(RevertReason::NonPayableValue));
        }
        let have = state.ext_balance(&e.msg.sender);
        if have < value {
            return Ok(RunOutcome::Revert(RevertReason::InsufficientFunds));
        }
        state.ext_balances.insert(e.msg.sender, have - value);
        state.balance = state.balance.overflowing_add(value).0;
    }

    let mut locals = HashMap::new();
    for (p, a) in f.params.iter().zip(&e.msg.args) {
        locals.insert(p.name.clone(), a.clone());
    }
    let mut m = Machine {
        state,
        event: e,
        origin,
        locals,
    };
    if let Err(r) = m.block(&f.body) {
        return Ok(RunOutcome::Revert(r));
    }
    let mut state = m.state;
    if f.name == crate::CALLBACK_FN {
        if let Some(qid) = e.msg.args.first().and_then(Value::as_word) {
            state.pending_queries.remove(&qid);
        }
    }
    Ok(RunOutcome::Ok(state))
}

enum Flow {
    Next,
    Return,
}

type Exec<T> = Result<T, RevertReason>;

struct Machine<'a> {
    state: WorldState,
    event: &'a Event,
    origin: Option<usize>,
    locals: HashMap<String, Value>,
}

impl Machine<'_> {
    fn block(&mut self, b: &[Stmt]) -> Exec<Flow> {
        for s in b {
            if let Flow::Return = self.stmt(s)? {
                return Ok(Flow::Return);
            }
        }
        Ok(Flow::Next)
    }

    fn stmt(&mut self, s: &Stmt) -> Exec<Flow> {
        match s {
            Stmt::Local { name, ty, init } => {
                let v = self.rhs(init)?.coerce(*ty);
                self.locals.insert(name.clone(), v);
            }
            Stmt::Assign { target, op, value } => {
                let v = match op.binop() {
                    None => self.rhs(value)?,
                    Some(bop) => {
                        let cur = self.eval(target)?;
                        let rhs = self.eval(value)?;
                        arith(bop, word(&cur), word(&rhs))?
                    }
                };
                self.store(target, v)?;
            }
            Stmt::Require(cond) => {
                if !self.eval_bool(cond)? {
                    return Err(RevertReason::RequireFailed);
                }
            }
            Stmt::Throw => return Err(RevertReason::ExplicitThrow),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval_bool(cond)? {
                    return self.block(then_branch);
                } else if let Some(b) = else_branch {
                    return self.block(b);
                }
            }
            Stmt::For {
                var,
                start,
                bound,
                inclusive,
                body,
            } => {
                let mut i = word(&self.eval(start)?);
                let mut iterations = 0usize;
                loop {
                    let b = word(&self.eval(bound)?);
                    let go = if *inclusive { i <= b } else { i < b };
                    if !go {
                        break;
                    }
                    if iterations == LOOP_CAP {
                        return Err(RevertReason::LoopCap);
                    }
                    iterations += 1;
                    self.locals.insert(var.clone(), Value::Uint(i));
                    if let Flow::Return = self.block(body)? {
                        return Ok(Flow::Return);
                    }
                    i = i.overflowing_add(U256::one()).0;
                }
            }
            Stmt::Send { to, amount } => {
                let to = word_to_addr(word(&self.eval(to)?));
                let amount = word(&self.eval(amount)?);
                let ok = self.state.balance >= amount;
                if ok {
                    self.state.balance -= amount;
                    let cur = self.state.ext_balance(&to);
                    self.state
                        .ext_balances
                        .insert(to, cur.overflowing_add(amount).0);
                }
                self.state.transfer_log.push(Transfer {
                    to,
                    amount,
                    succeeded: ok,
                });
            }
            Stmt::Push { array, value } => {
                let v = self.eval(value)?;
                match self.place(array)? {
                    Value::Array { elem, items } => {
                        let elem = *elem;
                        items.push(v.coerce(elem));
                    }
                    _ => unreachable!("resolver admits push only on arrays"),
                }
            }
            Stmt::Return(e) => {
                if let Some(e) = e {
                    self.eval(e)?;
                }
                return Ok(Flow::Return);
            }
        }
        Ok(Flow::Next)
    }

    /// Evaluates an assignment right-hand side, which may issue an oracle query.
    fn rhs(&mut self, e: &Expr) -> Exec<Value> {
        let Expr::OracleQuery(args) = e else {
            return self.eval(e);
        };
        let args = args.iter().map(|a| self.eval(a)).collect::<Exec<Vec<_>>>()?;
        let qid = self.state.next_qid;
        self.state.pending_queries.insert(
            qid,
            PendingQuery {
                origin: self.origin,
                args,
            },
        );
        self.state.next_qid = qid.overflowing_add(U256::one()).0;
        Ok(Value::Uint(qid))
    }

    fn store(&mut self, target: &Expr, v: Value) -> Exec<()> {
        if let Expr::Local(name) = target {
            let slot = self
                .locals
                .get_mut(name)
                .expect("resolver guarantees declared locals");
            let ty = slot.scalar_type().expect("locals are scalars");
            *slot = v.coerce(ty);
            return Ok(());
        }
        let slot = self.place(target)?;
        let ty = slot.scalar_type().expect("resolver admits only scalar targets");
        *slot = v.coerce(ty);
        Ok(())
    }

    /// Mutable access to a field location, creating absent map entries.
    fn place(&mut self, e: &Expr) -> Exec<&mut Value> {
        let mut keys = Vec::new();
        let mut cur = e;
        while let Expr::Index(base, idx) = cur {
            keys.push(self.eval(idx)?);
            cur = base;
        }
        let Expr::Field(name) = cur else {
            unreachable!("resolver admits only field-rooted places")
        };
        let mut slot = self
            .state
            .fields
            .get_mut(name)
            .expect("state holds every declared field");
        for k in keys.into_iter().rev() {
            slot = match slot {
                Value::Map { value, entries, .. } => {
                    let fresh = Value::default_of(value);
                    entries.entry(word(&k)).or_insert(fresh)
                }
                Value::Array { items, .. } => {
                    let i = index(&k, items.len())?;
                    &mut items[i]
                }
                _ => unreachable!("resolver admits indexing only on containers"),
            };
        }
        Ok(slot)
    }

    /// Reads a field location without materialising absent map entries.
    fn read_place(&mut self, e: &Expr) -> Exec<Value> {
        let mut keys = Vec::new();
        let mut cur = e;
        while let Expr::Index(base, idx) = cur {
            keys.push(self.eval(idx)?);
            cur = base;
        }
        let Expr::Field(name) = cur else {
            unreachable!("resolver admits only field-rooted places")
        };
        let mut slot = &self.state.fields[name];
        let depth = keys.len();
        for (level, k) in keys.into_iter().rev().enumerate() {
            slot = match slot {
                Value::Map { value, entries, .. } => match entries.get(&word(&k)) {
                    Some(v) => v,
                    None => {
                        // Absent entry: the default of whatever type the
                        // remaining keys would reach.
                        let mut ty: &TypeTag = value;
                        for _ in level + 1..depth {
                            match ty {
                                TypeTag::Map(_, v) => ty = v,
                                _ => unreachable!("resolver checks index depth"),
                            }
                        }
                        return Ok(Value::default_of(ty));
                    }
                },
                Value::Array { items, .. } => &items[index(&k, items.len())?],
                _ => unreachable!("resolver admits indexing only on containers"),
            };
        }
        Ok(slot.clone())
    }

    fn eval_bool(&mut self, e: &Expr) -> Exec<bool> {
        Ok(self
            .eval(e)?
            .as_bool()
            .expect("resolver guarantees boolean conditions"))
    }

    fn eval(&mut self, e: &Expr) -> Exec<Value> {
        let event = self.event;
        let msg = &event.msg;
        Ok(match e {
            Expr::Uint(v) => Value::Uint(*v),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Addr(a) => Value::Addr(*a),
            Expr::MsgSender => Value::Addr(msg.sender),
            Expr::MsgValue => Value::Uint(msg.value),
            Expr::Now => Value::Uint(msg.timestamp),
            Expr::BlockNumber => Value::Uint(msg.blocknumber),
            Expr::BalanceThis => Value::Uint(self.state.balance),
            Expr::Local(name) => self.locals[name].clone(),
            Expr::Field(name) => self.state.fields[name].clone(),
            Expr::Name(..) | Expr::OracleQuery(_) => {
                unreachable!("resolver removes names and nested queries")
            }
            Expr::Index(..) => self.read_place(e)?,
            Expr::Length(base) => match base.as_ref() {
                Expr::Field(name) => match &self.state.fields[name] {
                    Value::Array { items, .. } => Value::Uint(U256::from(items.len())),
                    _ => unreachable!("resolver admits .length only on arrays"),
                },
                _ => unreachable!("arrays are only stored in fields"),
            },
            Expr::Unary(UnOp::Not, inner) => Value::Bool(!self.eval_bool(inner)?),
            Expr::Binary(BinOp::And, l, r) => Value::Bool(self.eval_bool(l)? && self.eval_bool(r)?),
            Expr::Binary(BinOp::Or, l, r) => Value::Bool(self.eval_bool(l)? || self.eval_bool(r)?),
            Expr::Binary(op, l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                match op {
                    BinOp::Eq => Value::Bool(a.as_word() == b.as_word()),
                    BinOp::Ne => Value::Bool(a.as_word() != b.as_word()),
                    BinOp::Lt => Value::Bool(word(&a) < word(&b)),
                    BinOp::Le => Value::Bool(word(&a) <= word(&b)),
                    BinOp::Gt => Value::Bool(word(&a) > word(&b)),
                    BinOp::Ge => Value::Bool(word(&a) >= word(&b)),
                    _ => arith(*op, word(&a), word(&b))?,
                }
            }
        })
    }
}

fn word(v: &Value) -> U256 {
    v.as_word().expect("resolver guarantees scalar operands")
}

fn index(k: &Value, len: usize) -> Exec<usize> {
    let k = word(k);
    if k >= U256::from(len) {
        return Err(RevertReason::IndexOOB);
    }
    Ok(k.as_usize())
}

fn arith(op: BinOp, a: U256, b: U256) -> Exec<Value> {
    let v = match op {
        BinOp::Add => a.overflowing_add(b).0,
        BinOp::Sub => a.overflowing_sub(b).0,
        BinOp::Mul => a.overflowing_mul(b).0,
        BinOp::Div | BinOp::Mod if b.is_zero() => return Err(RevertReason::DivByZero),
        BinOp::Div => a / b,
        BinOp::Mod => a % b,
        _ => unreachable!("not an arithmetic operator"),
    };
    Ok(Value::Uint(v))
}
