//! End-to-end analysis and the self-contained JSON report with replay.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::effects::{hb_candidate_pairs, pure_events_filter, rw_table, FunctionEffects};
use crate::events::{callback_results, generate_events, Accounts, Scenario, ScenarioError};
use crate::fuzzer::{dedupe_witnesses, find_eo_bugs, minimize, verify_witness, FuzzConfig, FuzzError, Truncation, Witness};
use crate::hb::{extract_whb, ProbePolicy};
use crate::lang::{parse, ContractDef, ParseError, ScalarType};
use crate::linearizer::{
    check_lin, is_linearizable, match_call_return, Execution, LinConfig, LinError, LinViolation,
};
use crate::vm::{
    exec_trace, fmt_addr, output_of, parse_addr, parse_uint, state_from_json, state_to_json, Event,
    EventStatus, ExecMode, Message, Output, Value, VmError, WorldState,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sync,
    Lin,
    Both,
}

impl Mode {
    pub fn sync(self) -> bool {
        self != Mode::Lin
    }
    pub fn lin(self) -> bool {
        self != Mode::Sync
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    /// Defaults to `Both` when the contract has a callback, else `Sync`.
    pub mode: Option<Mode>,
    pub kmin: Option<usize>,
    pub kmax: Option<usize>,
    pub witness_cap: usize,
    pub pairwise: bool,
    pub cross_entry: bool,
    pub compare_transfers: bool,
    pub timeout: Option<Duration>,
    pub max_traces: Option<u64>,
    pub probe: ProbePolicy,
    pub seed: u64,
    pub record_timing: bool,
    /// Replaces the scenario's own initial state.
    pub snapshot: Option<Json>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        let f = FuzzConfig::default();
        AnalyzeOptions {
            mode: None,
            kmin: None,
            kmax: None,
            witness_cap: f.witness_cap,
            pairwise: false,
            cross_entry: false,
            compare_transfers: false,
            timeout: f.timeout,
            max_traces: None,
            probe: ProbePolicy::default(),
            seed: 0,
            record_timing: false,
            snapshot: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Fuzz(#[from] FuzzError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Vm(#[from] VmError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractInfo {
    pub name: String,
    pub source_sha256: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub mode: Mode,
    pub min_len: String,
    pub max_len: String,
    pub witness_cap: String,
    pub pairwise: bool,
    pub cross_entry: bool,
    pub compare_transfers: bool,
    pub probe: String,
    pub timeout_ms: Option<String>,
    pub max_traces: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountRow {
    pub name: String,
    pub address: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub function: String,
    pub sender: String,
    pub value: String,
    pub args: Vec<String>,
    pub timestamp: String,
    pub blocknumber: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HbRow {
    pub before: usize,
    pub after: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRow {
    pub state: Json,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub trace_a: Vec<usize>,
    pub trace_b: Vec<usize>,
    pub functions_a: Vec<String>,
    pub functions_b: Vec<String>,
    pub output_a: OutputRow,
    pub output_b: OutputRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncSection {
    pub stats: BTreeMap<String, String>,
    pub truncated: Option<Truncation>,
    pub full: Vec<WitnessRow>,
    pub minimized: Vec<WitnessRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionRow {
    pub schedule: Vec<String>,
    pub events: Vec<EventRow>,
    pub statuses: Vec<String>,
    pub output: OutputRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRow {
    pub call: usize,
    pub ret: usize,
    pub qid: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRow {
    pub calls: Vec<usize>,
    pub results: Vec<Vec<String>>,
    pub flagged: ExecutionRow,
    pub closest_linearizable: ExecutionRow,
    pub pairing: Vec<PairRow>,
    pub pairing_issues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinSection {
    pub stats: BTreeMap<String, String>,
    pub skipped: Option<String>,
    pub truncated: bool,
    pub violations: Vec<ViolationRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub seed: String,
    pub contract: ContractInfo,
    pub settings: Settings,
    pub scenario: Json,
    pub initial_state: Json,
    pub accounts: Vec<AccountRow>,
    pub events: Vec<EventRow>,
    pub rw_sets: Vec<FunctionEffects>,
    pub pure_functions: Vec<String>,
    pub hb: Vec<HbRow>,
    pub sync: Option<SyncSection>,
    pub lin: Option<LinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<String>,
}

impl AnalysisReport {
    pub fn bug_count(&self) -> usize {
        self.sync.as_ref().map_or(0, |s| s.minimized.len())
            + self.lin.as_ref().map_or(0, |l| l.violations.len())
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Everything the analysis produced, plus the report built from it.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub contract: ContractDef,
    pub s0: WorldState,
    pub accounts: Accounts,
    pub events: Vec<Event>,
    pub full: Vec<Witness>,
    pub minimized: Vec<Witness>,
    pub violations: Vec<LinViolation>,
    pub report: AnalysisReport,
}

pub fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

pub fn analyze(source: &str, scenario: &Json, opts: &AnalyzeOptions) -> Result<Analysis, AnalyzeError> {
    let started = Instant::now();
    let c = parse(source)?;
    let sc = Scenario::from_json(scenario)?;
    let accounts = sc.accounts()?;
    let s0 = sc.initial_state(&c, opts.snapshot.as_ref())?;
    let has_cb = c.function(crate::CALLBACK_FN).is_some();
    let mode = opts.mode.unwrap_or(if has_cb { Mode::Both } else { Mode::Sync });
    if mode.lin() && !has_cb {
        return Err(LinError::NoCallback.into());
    }
    let kmin = opts.kmin.unwrap_or(sc.min_trace_len);
    let kmax = opts.kmax.unwrap_or(sc.max_trace_len);
    if kmin < 2 || kmax < kmin {
        return Err(FuzzError::BadLengths(kmin, kmax).into());
    }

    let events = generate_events(&c, &sc, &s0)?.events;
    let cands = hb_candidate_pairs(&c);
    let r = extract_whb(&c, &s0, &events, &cands, opts.probe)?;

    let mut full = Vec::new();
    let mut minimized = Vec::new();
    let mut sync = None;
    if mode.sync() {
        let cfg = FuzzConfig {
            kmin,
            kmax,
            witness_cap: opts.witness_cap,
            pairwise: opts.pairwise,
            cross_entry: opts.cross_entry,
            compare_transfers: opts.compare_transfers,
            timeout: opts.timeout,
            max_traces: opts.max_traces,
        };
        let res = find_eo_bugs(&c, &s0, &events, &r, &cfg)?;
        let shrunk = res
            .witnesses
            .iter()
            .map(|w| minimize(&c, &s0, &events, w, opts.compare_transfers))
            .collect::<Result<Vec<_>, _>>()?;
        minimized = dedupe_witnesses(&events, shrunk);
        full = res.witnesses;
        let mut stats = res.stats;
        stats.minimized_count = minimized.len() as u64;
        sync = Some(SyncSection {
            stats: stringify(&stats),
            truncated: res.truncated,
            full: full.iter().map(|w| witness_row(&events, w)).collect(),
            minimized: minimized.iter().map(|w| witness_row(&events, w)).collect(),
        });
    }

    let mut violations = Vec::new();
    let mut lin = None;
    if mode.lin() {
        let results = callback_results(&c, &sc)?;
        let cfg = LinConfig {
            kmax,
            compare_transfers: opts.compare_transfers,
            timeout: opts.timeout,
        };
        let res = check_lin(&c, &s0, &events, accounts.oracle.1, &results, &cfg)?;
        let stats: BTreeMap<String, String> = [
            ("call_events", res.stats.call_events as u64),
            ("groups", res.stats.groups),
            ("interleavings", res.stats.interleavings),
            ("canonical_outputs", res.stats.canonical_outputs),
            ("violations_found", res.stats.violations_found),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        lin = Some(LinSection {
            stats,
            skipped: res.skipped,
            truncated: res.truncated,
            violations: res.violations.iter().map(|v| violation_row(&accounts, v)).collect(),
        });
        violations = res.violations;
    }

    let report = AnalysisReport {
        tool_version: TOOL_VERSION.into(),
        seed: opts.seed.to_string(),
        contract: ContractInfo {
            name: c.name.clone(),
            source_sha256: sha256_hex(source),
            source: source.into(),
        },
        settings: Settings {
            mode,
            min_len: kmin.to_string(),
            max_len: kmax.to_string(),
            witness_cap: opts.witness_cap.to_string(),
            pairwise: opts.pairwise,
            cross_entry: opts.cross_entry,
            compare_transfers: opts.compare_transfers,
            probe: match opts.probe {
                ProbePolicy::ValueCoherent => "coherent".into(),
                ProbePolicy::AllPairs => "all".into(),
            },
            timeout_ms: opts.timeout.map(|t| t.as_millis().to_string()),
            max_traces: opts.max_traces.map(|m| m.to_string()),
        },
        scenario: scenario.clone(),
        initial_state: state_to_json(&s0),
        accounts: accounts
            .all()
            .map(|(n, a)| AccountRow {
                name: n.into(),
                address: fmt_addr(&a),
            })
            .collect(),
        events: events
            .iter()
            .enumerate()
            .map(|(i, e)| event_row(&accounts, Some(i), e))
            .collect(),
        rw_sets: rw_table(&c),
        pure_functions: pure_events_filter(&c).into_iter().collect(),
        hb: r
            .pairs
            .iter()
            .map(|&(i, j)| HbRow {
                before: i,
                after: j,
                text: format!("{} -> {}", accounts.describe(&events[i]), accounts.describe(&events[j])),
            })
            .collect(),
        sync,
        lin,
        wall_time_ms: opts
            .record_timing
            .then(|| started.elapsed().as_millis().to_string()),
    };
    Ok(Analysis {
        contract: c,
        s0,
        accounts,
        events,
        full,
        minimized,
        violations,
        report,
    })
}

fn stringify<T: Serialize>(v: &T) -> BTreeMap<String, String> {
    match serde_json::to_value(v).expect("stats serialise") {
        Json::Object(m) => m
            .into_iter()
            .map(|(k, v)| {
                let s = match v {
                    Json::String(s) => s,
                    other => other.to_string(),
                };
                (k, s)
            })
            .collect(),
        _ => BTreeMap::new(),
    }
}

fn output_row(o: &Output) -> OutputRow {
    OutputRow {
        state: o.to_json(),
        sha256: o.hash(),
    }
}

fn witness_row(events: &[Event], w: &Witness) -> WitnessRow {
    let names = |t: &[usize]| t.iter().map(|&i| events[i].func.clone()).collect();
    WitnessRow {
        trace_a: w.trace_a.clone(),
        trace_b: w.trace_b.clone(),
        functions_a: names(&w.trace_a),
        functions_b: names(&w.trace_b),
        output_a: output_row(&w.output_a),
        output_b: output_row(&w.output_b),
    }
}

fn event_row(accounts: &Accounts, index: Option<usize>, e: &Event) -> EventRow {
    EventRow {
        index,
        function: e.func.clone(),
        sender: fmt_addr(&e.msg.sender),
        value: e.msg.value.to_string(),
        args: e.msg.args.iter().map(Value::to_string).collect(),
        timestamp: e.msg.timestamp.to_string(),
        blocknumber: e.msg.blocknumber.to_string(),
        text: accounts.describe(e),
    }
}

fn status_str(s: &EventStatus) -> String {
    match s {
        EventStatus::Ok => "ok".into(),
        EventStatus::Reverted(r) => format!("reverted: {r}"),
        EventStatus::NotRun => "not run".into(),
    }
}

fn execution_row(accounts: &Accounts, x: &Execution) -> ExecutionRow {
    ExecutionRow {
        schedule: x
            .schedule
            .iter()
            .map(|s| format!("{} {}", if s.ret { "return" } else { "call" }, s.slot))
            .collect(),
        events: x.events.iter().map(|e| event_row(accounts, None, e)).collect(),
        statuses: x.statuses.iter().map(status_str).collect(),
        output: output_row(&x.output),
    }
}

fn violation_row(accounts: &Accounts, v: &LinViolation) -> ViolationRow {
    ViolationRow {
        calls: v.calls.clone(),
        results: v
            .results
            .iter()
            .map(|r| r.iter().map(Value::to_string).collect())
            .collect(),
        flagged: execution_row(accounts, &v.flagged),
        closest_linearizable: execution_row(accounts, &v.counterpart),
        pairing: v
            .pairing
            .transactions
            .iter()
            .map(|t| PairRow {
                call: t.call,
                ret: t.ret,
                qid: t.qid.to_string(),
            })
            .collect(),
        pairing_issues: v.pairing.issues.iter().map(|i| format!("{i:?}")).collect(),
    }
}

/// Human-readable summary for the terminal.
pub fn summary(a: &Analysis) -> String {
    let r = &a.report;
    let mut s = String::new();
    let _ = writeln!(s, "contract {} ({} events, {} hb pairs)", r.contract.name, r.events.len(), r.hb.len());
    for h in &r.hb {
        let _ = writeln!(s, "  hb {} -> {}: {}", h.before, h.after, h.text);
    }
    if let Some(sync) = &r.sync {
        let st = &sync.stats;
        let get = |k: &str| st.get(k).map_or("0", String::as_str);
        let _ = writeln!(
            s,
            "sync: {} traces, {} valid, {} full witnesses, {} minimized",
            get("traces_enumerated"),
            get("traces_valid"),
            sync.full.len(),
            sync.minimized.len()
        );
        if let Some(t) = sync.truncated {
            let _ = writeln!(s, "  truncated: {t:?}");
        }
        for w in &a.minimized {
            let _ = writeln!(s, "  witness:");
            for (label, t) in [("a", &w.trace_a), ("b", &w.trace_b)] {
                let calls: Vec<String> = t.iter().map(|&i| a.accounts.describe(&a.events[i])).collect();
                let _ = writeln!(s, "    {label}: {}", calls.join("; "));
            }
        }
    }
    if let Some(lin) = &r.lin {
        if let Some(why) = &lin.skipped {
            let _ = writeln!(s, "lin: skipped, {why}");
        } else {
            let _ = writeln!(s, "lin: {} violations", lin.violations.len());
        }
        for v in &a.violations {
            for (label, x) in [("flagged", &v.flagged), ("closest", &v.counterpart)] {
                let calls: Vec<String> = x.events.iter().map(|e| a.accounts.describe(e)).collect();
                let _ = writeln!(s, "    {label}: {}", calls.join("; "));
            }
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error("replay mismatch in {witness}: {reason}")]
    ReplayMismatch { witness: String, reason: String },
}

fn mismatch(witness: impl Into<String>, reason: impl Into<String>) -> ReplayError {
    ReplayError::ReplayMismatch {
        witness: witness.into(),
        reason: reason.into(),
    }
}

fn malformed(e: impl std::fmt::Display) -> ReplayError {
    ReplayError::Malformed(e.to_string())
}

/// Counts of what a successful replay checked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifySummary {
    pub witnesses: usize,
    pub violations: usize,
}

/// Re-executes every witness and violation against the embedded contract,
/// scenario and starting state.
pub fn verify_report(report: &AnalysisReport) -> Result<VerifySummary, ReplayError> {
    let src = &report.contract.source;
    if sha256_hex(src) != report.contract.source_sha256 {
        return Err(mismatch("contract", "source hash differs"));
    }
    let c = parse(src).map_err(malformed)?;
    let sc = Scenario::from_json(&report.scenario).map_err(malformed)?;
    let accounts = sc.accounts().map_err(malformed)?;
    let resolve = |n: &str| accounts.lookup(n);
    let s0 = state_from_json(&c, &report.initial_state, &resolve).map_err(malformed)?;
    let transfers = report.settings.compare_transfers;
    let events = report
        .events
        .iter()
        .map(|row| event_from_row(&c, row))
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary = VerifySummary::default();
    if let Some(sync) = &report.sync {
        let all = sync
            .full
            .iter()
            .enumerate()
            .map(|(i, w)| (format!("full witness {i}"), w))
            .chain(
                sync.minimized
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (format!("minimized witness {i}"), w)),
            );
        for (label, row) in all {
            check_witness(&c, &s0, &events, row, transfers).map_err(|reason| mismatch(&label, reason))?;
            summary.witnesses += 1;
        }
    }
    if let Some(lin) = &report.lin {
        for (i, v) in lin.violations.iter().enumerate() {
            check_violation(&c, &s0, v, transfers).map_err(|reason| mismatch(format!("lin violation {i}"), reason))?;
            summary.violations += 1;
        }
    }
    Ok(summary)
}

pub fn verify_report_json(text: &str) -> Result<VerifySummary, ReplayError> {
    let report: AnalysisReport = serde_json::from_str(text).map_err(malformed)?;
    verify_report(&report)
}

fn check_output(o: &Output, row: &OutputRow, what: &str) -> Result<(), String> {
    if o.hash() != row.sha256 {
        return Err(format!("{what}: output hash differs"));
    }
    if o.to_json() != row.state {
        return Err(format!("{what}: output state differs"));
    }
    Ok(())
}

fn check_witness(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    row: &WitnessRow,
    transfers: bool,
) -> Result<(), String> {
    if row.trace_a.iter().chain(&row.trace_b).any(|&i| i >= events.len()) {
        return Err("event index out of range".into());
    }
    let mut outs = Vec::new();
    for (t, what) in [(&row.trace_a, "trace a"), (&row.trace_b, "trace b")] {
        let evs: Vec<Event> = t.iter().map(|&i| events[i].clone()).collect();
        let out = exec_trace(c, s0, &evs, ExecMode::Strict).map_err(|e| e.to_string())?;
        if !out.valid {
            return Err(format!("{what} is not valid"));
        }
        outs.push(output_of(&out.final_state, transfers));
    }
    check_output(&outs[0], &row.output_a, "trace a")?;
    check_output(&outs[1], &row.output_b, "trace b")?;
    let w = Witness {
        trace_a: row.trace_a.clone(),
        trace_b: row.trace_b.clone(),
        output_a: outs[0].clone(),
        output_b: outs[1].clone(),
    };
    if !verify_witness(c, s0, events, &w, transfers).map_err(|e| e.to_string())? {
        return Err("traces are not permutations with differing outputs".into());
    }
    Ok(())
}

fn check_violation(c: &ContractDef, s0: &WorldState, v: &ViolationRow, transfers: bool) -> Result<(), String> {
    let mut outs = Vec::new();
    let mut linear = Vec::new();
    for (x, what) in [(&v.flagged, "flagged"), (&v.closest_linearizable, "closest")] {
        let evs = x
            .events
            .iter()
            .map(|r| event_from_row(c, r))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let out = exec_trace(c, s0, &evs, ExecMode::Tolerant).map_err(|e| e.to_string())?;
        let statuses: Vec<String> = out.statuses.iter().map(status_str).collect();
        if statuses != x.statuses {
            return Err(format!("{what}: validity differs"));
        }
        let o = output_of(&out.final_state, transfers);
        check_output(&o, &x.output, what)?;
        linear.push(is_linearizable(&match_call_return(&evs, &out)));
        outs.push(o);
    }
    if outs[0] == outs[1] {
        return Err("outputs are equal".into());
    }
    if linear[0] || !linear[1] {
        return Err("linearizability verdicts differ".into());
    }
    Ok(())
}

fn event_from_row(c: &ContractDef, row: &EventRow) -> Result<Event, ReplayError> {
    let f = c
        .function(&row.function)
        .ok_or_else(|| malformed(format!("unknown function `{}`", row.function)))?;
    if f.params.len() != row.args.len() {
        return Err(malformed(format!("wrong argument count for `{}`", row.function)));
    }
    let uint = |s: &str| parse_uint(s).ok_or_else(|| malformed(format!("bad integer `{s}`")));
    let args = f
        .params
        .iter()
        .zip(&row.args)
        .map(|(p, a)| match p.ty {
            ScalarType::Uint => uint(a).map(Value::Uint),
            ScalarType::Address => parse_addr(a)
                .map(Value::Addr)
                .ok_or_else(|| malformed(format!("bad address `{a}`"))),
            ScalarType::Bool => match a.as_str() {
                "true" => Ok(Value::Bool(true)),
                "false" => Ok(Value::Bool(false)),
                _ => Err(malformed(format!("bad bool `{a}`"))),
            },
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Event {
        func: row.function.clone(),
        msg: Message {
            sender: parse_addr(&row.sender).ok_or_else(|| malformed(format!("bad sender `{}`", row.sender)))?,
            value: uint(&row.value)?,
            args,
            timestamp: uint(&row.timestamp)?,
            blocknumber: uint(&row.blocknumber)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    const SRC: &str = r#"contract C {
        uint256 x;
        uint256 y;
        function set(uint256 a) { x = a; }
        function copy() { y = x; }
    }"#;

    fn run() -> Analysis {
        let sc = json!({ "actors": [{ "name": "A" }], "constants": ["4"], "harvest": false,
                         "budgets": { "per_function": { "set": 1 } } });
        analyze(SRC, &sc, &AnalyzeOptions::default()).unwrap()
    }

    #[test]
    fn round_trip() {
        let a = run();
        assert_eq!(a.report.bug_count(), 1);
        let text = a.report.to_json_string();
        let s = verify_report_json(&text).unwrap();
        assert_eq!(s.witnesses, 2);
    }

    #[test]
    fn deterministic_bytes() {
        assert_eq!(run().report.to_json_string(), run().report.to_json_string());
    }

    #[test]
    fn tampered_hash_rejected() {
        let mut r = run().report;
        r.sync.as_mut().unwrap().minimized[0].output_a.sha256 = "00".repeat(32);
        assert!(matches!(verify_report(&r), Err(ReplayError::ReplayMismatch { .. })));
    }

    #[test]
    fn other_version_still_verifies() {
        let mut r = run().report;
        r.tool_version = "0.0.0-other".into();
        assert!(verify_report(&r).is_ok());
    }

    #[test]
    fn integers_are_strings() {
        let j: Json = serde_json::from_str(&run().report.to_json_string()).unwrap();
        let stats = &j["sync"]["stats"];
        assert!(stats["traces_enumerated"].is_string());
        assert!(j["wall_time_ms"].is_null());
    }
}
