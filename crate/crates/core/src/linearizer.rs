//! Linearizability checking for contracts that use the oracle call/callback pattern.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use primitive_types::U256;
use rayon::prelude::*;
use thiserror::Error;

use crate::effects::{rw_set, ORACLE};
use crate::lang::{Address, ContractDef};
use crate::vm::{
    exec_event, exec_trace, output_of, Event, EventStatus, ExecMode, Message, Output, RunOutcome,
    TraceOutcome, Value, VmError, WorldState,
};
use crate::CALLBACK_FN;

/// A call and the callback that answers its query, as trace positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalTransaction {
    pub call: usize,
    pub ret: usize,
    pub qid: U256,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingIssue {
    /// A callback whose query id was never issued earlier in the trace.
    Unmatched { pos: usize, qid: Option<U256> },
    /// A second callback for an already answered query id.
    DuplicateCallback { pos: usize, qid: U256 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pairing {
    pub transactions: Vec<LogicalTransaction>,
    pub issues: Vec<PairingIssue>,
}

/// Pairs each issued query id with the first later callback carrying it.
pub fn match_call_return(h: &[Event], outcome: &TraceOutcome) -> Pairing {
    let mut issuer: BTreeMap<U256, usize> = BTreeMap::new();
    let mut answered: BTreeSet<U256> = BTreeSet::new();
    let mut p = Pairing::default();
    for (pos, e) in h.iter().enumerate() {
        if e.func == CALLBACK_FN {
            let qid = match e.msg.args.first() {
                Some(Value::Uint(q)) => *q,
                _ => {
                    p.issues.push(PairingIssue::Unmatched { pos, qid: None });
                    continue;
                }
            };
            match issuer.get(&qid) {
                Some(_) if answered.contains(&qid) => {
                    p.issues.push(PairingIssue::DuplicateCallback { pos, qid });
                }
                Some(&call) => {
                    answered.insert(qid);
                    p.transactions.push(LogicalTransaction { call, ret: pos, qid });
                }
                None => p.issues.push(PairingIssue::Unmatched { pos, qid: Some(qid) }),
            }
        }
        for q in outcome.issued.get(pos).into_iter().flatten() {
            issuer.insert(*q, pos);
        }
    }
    p.transactions.sort_by_key(|t| t.call);
    p
}

/// True iff no transaction starts while another one is still open.
pub fn is_linearizable(pairing: &Pairing) -> bool {
    let ts = &pairing.transactions;
    ts.iter()
        .all(|a| ts.iter().all(|b| !(a.call < b.call && b.call < a.ret)))
}

/// One position of an interleaving: the call of a chosen call event, or
/// the callback answering it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Step {
    /// Position within the chosen calls.
    pub slot: usize,
    pub ret: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinConfig {
    /// Longest trace; at most `kmax / 2` transactions are combined.
    pub kmax: usize,
    pub compare_transfers: bool,
    pub timeout: Option<Duration>,
}

impl Default for LinConfig {
    fn default() -> Self {
        LinConfig {
            kmax: 6,
            compare_transfers: false,
            timeout: Some(Duration::from_secs(150 * 60)),
        }
    }
}

/// An interleaving as executed: the events sent and what happened to each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub schedule: Vec<Step>,
    pub events: Vec<Event>,
    pub statuses: Vec<EventStatus>,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinViolation {
    /// Indices into the event set of the calls, in slot order.
    pub calls: Vec<usize>,
    /// Callback result arguments per slot.
    pub results: Vec<Vec<Value>>,
    pub flagged: Execution,
    /// Closest atomic interleaving of the same calls and results.
    pub counterpart: Execution,
    pub pairing: Pairing,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinStats {
    pub call_events: usize,
    pub groups: u64,
    pub interleavings: u64,
    pub canonical_outputs: u64,
    pub violations_found: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinResult {
    pub violations: Vec<LinViolation>,
    pub stats: LinStats,
    pub skipped: Option<String>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinError {
    #[error("contract declares no `{CALLBACK_FN}`")]
    NoCallback,
    #[error("no callback results to deliver")]
    NoResults,
    #[error(transparent)]
    Vm(#[from] VmError),
}

/// Indices of events whose function issues oracle queries.
pub fn call_events(c: &ContractDef, events: &[Event]) -> Vec<usize> {
    let issuing: BTreeSet<&str> = c
        .functions
        .iter()
        .filter(|f| f.name != CALLBACK_FN && rw_set(f).writes.contains(ORACLE))
        .map(|f| f.name.as_str())
        .collect();
    (0..events.len())
        .filter(|&i| issuing.contains(events[i].func.as_str()))
        .collect()
}

/// All orders of `m` calls and their returns with each call first,
/// lexicographic over `(slot, ret)`.
pub fn schedules(m: usize) -> Vec<Vec<Step>> {
    fn go(m: usize, called: &mut Vec<bool>, returned: &mut Vec<bool>, cur: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if cur.len() == 2 * m {
            out.push(cur.clone());
            return;
        }
        for slot in 0..m {
            for ret in [false, true] {
                let ok = if ret { called[slot] && !returned[slot] } else { !called[slot] };
                if !ok {
                    continue;
                }
                let flag = if ret { &mut *returned } else { &mut *called };
                flag[slot] = true;
                cur.push(Step { slot, ret });
                go(m, called, returned, cur, out);
                cur.pop();
                let flag = if ret { &mut *returned } else { &mut *called };
                flag[slot] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(m, &mut vec![false; m], &mut vec![false; m], &mut Vec::new(), &mut out);
    out
}

/// Every call immediately followed by its own return.
pub fn is_atomic(schedule: &[Step]) -> bool {
    schedule
        .chunks(2)
        .all(|p| p.len() == 2 && !p[0].ret && p[1].ret && p[0].slot == p[1].slot)
}

/// Number of pairs ordered differently by two permutations of the same steps.
pub fn kendall_tau(a: &[Step], b: &[Step]) -> usize {
    let pos: BTreeMap<Step, usize> = b.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mapped: Vec<usize> = a.iter().map(|s| pos[s]).collect();
    let mut n = 0;
    for i in 0..mapped.len() {
        for j in i + 1..mapped.len() {
            if mapped[i] > mapped[j] {
                n += 1;
            }
        }
    }
    n
}

/// Runs a schedule in tolerant mode. A return whose call issued no query
/// is dropped.
pub fn execute_schedule(
    c: &ContractDef,
    s0: &WorldState,
    calls: &[&Event],
    results: &[Vec<Value>],
    oracle: Address,
    schedule: &[Step],
    compare_transfers: bool,
) -> Result<Execution, VmError> {
    let mut state = s0.clone();
    let mut qids: Vec<Option<U256>> = vec![None; calls.len()];
    let mut events = Vec::new();
    let mut statuses = Vec::new();
    for step in schedule {
        let e = if step.ret {
            let Some(qid) = qids[step.slot] else { continue };
            let call = &calls[step.slot].msg;
            let mut args = vec![Value::Uint(qid)];
            args.extend(results[step.slot].iter().cloned());
            Event {
                func: CALLBACK_FN.into(),
                msg: Message {
                    sender: oracle,
                    value: U256::zero(),
                    args,
                    timestamp: call.timestamp,
                    blocknumber: call.blocknumber,
                },
            }
        } else {
            calls[step.slot].clone()
        };
        match exec_event(c, &state, &e)? {
            RunOutcome::Ok(next) => {
                if !step.ret && next.next_qid != state.next_qid {
                    qids[step.slot] = Some(state.next_qid);
                }
                state = next;
                statuses.push(EventStatus::Ok);
            }
            RunOutcome::Revert(r) => statuses.push(EventStatus::Reverted(r)),
        }
        events.push(e);
    }
    Ok(Execution {
        schedule: schedule.to_vec(),
        events,
        statuses,
        output: output_of(&state, compare_transfers),
    })
}

/// Pairing of an executed event list, replayed in tolerant mode.
pub fn pairing_of(c: &ContractDef, s0: &WorldState, events: &[Event]) -> Result<(Pairing, TraceOutcome), VmError> {
    let out = exec_trace(c, s0, events, ExecMode::Tolerant)?;
    Ok((match_call_return(events, &out), out))
}

/// Compares every non-atomic interleaving of up to `kmax / 2` calls against
/// the outputs of the atomic interleavings of the same calls and results.
pub fn check_lin(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    oracle: Address,
    results: &[Vec<Value>],
    cfg: &LinConfig,
) -> Result<LinResult, LinError> {
    if c.function(CALLBACK_FN).is_none() {
        return Err(LinError::NoCallback);
    }
    if results.is_empty() {
        return Err(LinError::NoResults);
    }
    let calls = call_events(c, events);
    let mut stats = LinStats {
        call_events: calls.len(),
        ..LinStats::default()
    };
    if calls.len() < 2 {
        return Ok(LinResult {
            violations: Vec::new(),
            stats,
            skipped: Some(format!("{} oracle call event(s), need at least 2", calls.len())),
            truncated: false,
        });
    }

    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for m in 2..=(cfg.kmax / 2).min(calls.len()) {
        for chosen in combinations(calls.len(), m) {
            let picked: Vec<usize> = chosen.iter().map(|&i| calls[i]).collect();
            let mut odo = vec![0usize; m];
            loop {
                groups.push((picked.clone(), odo.clone()));
                let Some(i) = (0..m).rev().find(|&i| odo[i] + 1 < results.len()) else {
                    break;
                };
                odo[i] += 1;
                odo[i + 1..].iter_mut().for_each(|x| *x = 0);
            }
        }
    }

    let deadline = cfg.timeout.map(|t| Instant::now() + t);
    let mut by_m: BTreeMap<usize, Vec<Vec<Step>>> = BTreeMap::new();
    for (picked, _) in &groups {
        by_m.entry(picked.len()).or_insert_with(|| schedules(picked.len()));
    }
    let outcomes: Vec<Option<GroupResult>> = groups
        .par_iter()
        .map(|(picked, odo)| {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return Ok(None);
            }
            let evs: Vec<&Event> = picked.iter().map(|&i| &events[i]).collect();
            let res: Vec<Vec<Value>> = odo.iter().map(|&r| results[r].clone()).collect();
            check_group(c, s0, &evs, picked, &res, oracle, &by_m[&picked.len()], cfg).map(Some)
        })
        .collect::<Result<_, VmError>>()?;

    let mut violations = Vec::new();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut truncated = false;
    for g in outcomes {
        let Some(g) = g else {
            truncated = true;
            break;
        };
        stats.groups += 1;
        stats.interleavings += g.interleavings;
        stats.canonical_outputs += g.canonical;
        stats.violations_found += g.violations.len() as u64;
        for v in g.violations {
            let names = v.flagged.events.iter().map(|e| e.func.clone()).collect();
            if seen.insert(names) {
                violations.push(v);
            }
        }
    }
    Ok(LinResult {
        violations,
        stats,
        skipped: None,
        truncated,
    })
}

struct GroupResult {
    interleavings: u64,
    canonical: u64,
    violations: Vec<LinViolation>,
}

#[allow(clippy::too_many_arguments)]
fn check_group(
    c: &ContractDef,
    s0: &WorldState,
    calls: &[&Event],
    picked: &[usize],
    results: &[Vec<Value>],
    oracle: Address,
    all: &[Vec<Step>],
    cfg: &LinConfig,
) -> Result<GroupResult, VmError> {
    let run = |s: &[Step]| execute_schedule(c, s0, calls, results, oracle, s, cfg.compare_transfers);
    let atomic: Vec<Execution> = all
        .iter()
        .filter(|s| is_atomic(s))
        .map(|s| run(s))
        .collect::<Result<_, _>>()?;
    let canonical: BTreeSet<&Output> = atomic.iter().map(|e| &e.output).collect();
    let mut violations = Vec::new();
    for s in all.iter().filter(|s| !is_atomic(s)) {
        let flagged = run(s)?;
        if canonical.contains(&flagged.output) {
            continue;
        }
        let counterpart = atomic
            .iter()
            .min_by_key(|a| (kendall_tau(s, &a.schedule), a.schedule.clone()))
            .expect("at least one atomic order")
            .clone();
        let (pairing, _) = pairing_of(c, s0, &flagged.events)?;
        violations.push(LinViolation {
            calls: picked.to_vec(),
            results: results.to_vec(),
            flagged,
            counterpart,
            pairing,
        });
    }
    Ok(GroupResult {
        interleavings: all.len() as u64,
        canonical: canonical.len() as u64,
        violations,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Re-executes a violation: both executions reproduce their outputs, the
/// outputs differ and the counterpart is linearizable.
pub fn verify_violation(
    c: &ContractDef,
    s0: &WorldState,
    v: &LinViolation,
    compare_transfers: bool,
) -> Result<bool, VmError> {
    let replay = |x: &Execution| -> Result<bool, VmError> {
        let out = exec_trace(c, s0, &x.events, ExecMode::Tolerant)?;
        Ok(out.statuses == x.statuses && output_of(&out.final_state, compare_transfers) == x.output)
    };
    let (pairing, _) = pairing_of(c, s0, &v.counterpart.events)?;
    Ok(replay(&v.flagged)?
        && replay(&v.counterpart)?
        && v.flagged.output != v.counterpart.output
        && is_linearizable(&pairing))
}
