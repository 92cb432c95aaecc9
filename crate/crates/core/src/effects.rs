//! Static read/write sets, purity, and candidate pairs for happens-before probing.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::lang::{ContractDef, Expr, FunctionDef, Stmt};

/// Pseudo-field for the contract's Ether balance.
pub const BALANCE: &str = "@balance";
/// Pseudo-field for the pending oracle query table.
pub const ORACLE: &str = "@oracle";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadWriteSet {
    pub reads: BTreeSet<String>,
    pub writes: BTreeSet<String>,
}

impl ReadWriteSet {
    pub fn is_pure(&self) -> bool {
        self.reads.is_empty() && self.writes.is_empty()
    }

    pub fn touches(&self) -> BTreeSet<&str> {
        self.reads
            .iter()
            .chain(&self.writes)
            .map(String::as_str)
            .collect()
    }
}

/// Key-insensitive: any access to `m[k]` counts as touching all of `m`.
pub fn rw_set(f: &FunctionDef) -> ReadWriteSet {
    let mut rw = ReadWriteSet::default();
    if f.payable {
        rw.writes.insert(BALANCE.into());
    }
    if f.name == crate::CALLBACK_FN {
        rw.writes.insert(ORACLE.into());
    }
    stmts(&f.body, &mut rw);
    rw
}

fn stmts(b: &[Stmt], rw: &mut ReadWriteSet) {
    for s in b {
        match s {
            Stmt::Local { init, .. } => rhs(init, rw),
            Stmt::Assign { target, op, value } => {
                target_write(target, rw);
                if op.binop().is_some() {
                    reads(target, rw);
                }
                rhs(value, rw);
            }
            Stmt::Require(e) | Stmt::Return(Some(e)) => reads(e, rw),
            Stmt::Throw | Stmt::Return(None) => {}
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                reads(cond, rw);
                stmts(then_branch, rw);
                if let Some(b) = else_branch {
                    stmts(b, rw);
                }
            }
            Stmt::For {
                start, bound, body, ..
            } => {
                reads(start, rw);
                reads(bound, rw);
                stmts(body, rw);
            }
            Stmt::Send { to, amount } => {
                reads(to, rw);
                reads(amount, rw);
                rw.writes.insert(BALANCE.into());
            }
            Stmt::Push { array, value } => {
                target_write(array, rw);
                reads(array, rw);
                reads(value, rw);
            }
        }
    }
}

fn rhs(e: &Expr, rw: &mut ReadWriteSet) {
    if let Expr::OracleQuery(args) = e {
        rw.writes.insert(ORACLE.into());
        args.iter().for_each(|a| reads(a, rw));
    } else {
        reads(e, rw);
    }
}

/// Records the root field as written; index expressions are reads.
fn target_write(e: &Expr, rw: &mut ReadWriteSet) {
    match e {
        Expr::Field(name) => {
            rw.writes.insert(name.clone());
        }
        Expr::Index(base, idx) => {
            target_write(base, rw);
            reads(idx, rw);
        }
        _ => {}
    }
}

fn reads(e: &Expr, rw: &mut ReadWriteSet) {
    match e {
        Expr::Field(name) => {
            rw.reads.insert(name.clone());
        }
        Expr::BalanceThis => {
            rw.reads.insert(BALANCE.into());
        }
        Expr::Index(a, b) | Expr::Binary(_, a, b) => {
            reads(a, rw);
            reads(b, rw);
        }
        Expr::Length(a) | Expr::Unary(_, a) => reads(a, rw),
        Expr::OracleQuery(args) => args.iter().for_each(|a| reads(a, rw)),
        Expr::Uint(_)
        | Expr::Bool(_)
        | Expr::Addr(_)
        | Expr::Name(..)
        | Expr::Local(_)
        | Expr::MsgSender
        | Expr::MsgValue
        | Expr::Now
        | Expr::BlockNumber => {}
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionEffects {
    pub name: String,
    #[serde(flatten)]
    pub rw: ReadWriteSet,
}

/// Read/write sets for every function, in declaration order.
pub fn rw_table(c: &ContractDef) -> Vec<FunctionEffects> {
    c.functions
        .iter()
        .map(|f| FunctionEffects {
            name: f.name.clone(),
            rw: rw_set(f),
        })
        .collect()
}

/// Functions that neither read nor write contract state.
pub fn pure_events_filter(c: &ContractDef) -> BTreeSet<String> {
    c.functions
        .iter()
        .filter(|f| rw_set(f).is_pure())
        .map(|f| f.name.clone())
        .collect()
}

/// Unordered pairs `(f, g)`, with `f` declared no later than `g`, that share
/// a location at least one of them writes. Pure functions are skipped.
pub fn hb_candidate_pairs(c: &ContractDef) -> BTreeSet<(String, String)> {
    let table: Vec<FunctionEffects> = rw_table(c)
        .into_iter()
        .filter(|fe| !fe.rw.is_pure())
        .collect();
    let mut out = BTreeSet::new();
    for (i, f) in table.iter().enumerate() {
        for g in &table[i..] {
            if interferes(&f.rw, &g.rw, f.name == g.name) {
                out.insert((f.name.clone(), g.name.clone()));
            }
        }
    }
    out
}

fn interferes(f: &ReadWriteSet, g: &ReadWriteSet, same: bool) -> bool {
    if same {
        return f.reads.intersection(&f.writes).next().is_some();
    }
    let gt = g.touches();
    f.touches()
        .intersection(&gt)
        .any(|v| f.writes.contains(*v) || g.writes.contains(*v))
}

/// Whether events of `f` and `g` need probing, given the candidate set.
pub fn is_candidate(cands: &BTreeSet<(String, String)>, f: &str, g: &str) -> bool {
    cands.contains(&(f.to_string(), g.to_string())) || cands.contains(&(g.to_string(), f.to_string()))
}
