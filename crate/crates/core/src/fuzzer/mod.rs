//! Trace fuzzing over HB-respecting permutations of event subsets.

mod enumerate;
mod minimize;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hb::HbRelation;
use crate::lang::ContractDef;
use crate::vm::{exec_event, exec_trace, output_of, Event, ExecMode, Output, RunOutcome, VmError, WorldState};

pub use enumerate::{
    count_extensions, count_traces, enumerate_traces, linear_extensions, members, ordered_subsets,
    unconstrained_count, Subset, MAX_EVENTS,
};
pub use minimize::{dedupe_witnesses, minimize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub kmin: usize,
    pub kmax: usize,
    /// Witnesses kept per subset before minimisation.
    pub witness_cap: usize,
    /// Compare every pair of valid traces instead of each against a reference.
    pub pairwise: bool,
    /// Also compare traces that reorder events of the same function.
    pub cross_entry: bool,
    pub compare_transfers: bool,
    pub timeout: Option<Duration>,
    pub max_traces: Option<u64>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            kmin: 2,
            kmax: 6,
            witness_cap: 8,
            pairwise: false,
            cross_entry: false,
            compare_transfers: false,
            timeout: Some(Duration::from_secs(150 * 60)),
            max_traces: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FuzzStats {
    pub traces_enumerated: u64,
    pub traces_skipped_by_hb: u64,
    pub traces_valid: u64,
    pub subsets_visited: u64,
    pub witnesses_found: u64,
    pub minimized_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    Timeout,
    TraceCap,
}

/// Two valid permutations of the same events with different outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub trace_a: Vec<usize>,
    pub trace_b: Vec<usize>,
    pub output_a: Output,
    pub output_b: Output,
}

impl Witness {
    /// Sorted event indices shared by both traces.
    pub fn key(&self) -> Vec<usize> {
        let mut k = self.trace_a.clone();
        k.sort_unstable();
        k
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzResult {
    pub witnesses: Vec<Witness>,
    pub stats: FuzzStats,
    pub truncated: Option<Truncation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FuzzError {
    #[error("{0} events exceed the supported maximum of {MAX_EVENTS}")]
    TooManyEvents(usize),
    #[error("trace lengths must satisfy 2 <= min <= max, got {0}..={1}")]
    BadLengths(usize, usize),
    #[error(transparent)]
    Vm(#[from] VmError),
}

pub fn trace_events(events: &[Event], trace: &[usize]) -> Vec<Event> {
    trace.iter().map(|&i| events[i].clone()).collect()
}

/// Re-executes both traces: true iff both are valid and their outputs differ.
pub fn verify_witness(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    w: &Witness,
    compare_transfers: bool,
) -> Result<bool, VmError> {
    let mut a = w.trace_a.clone();
    let mut b = w.trace_b.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Ok(false);
    }
    let ra = exec_trace(c, s0, &trace_events(events, &w.trace_a), ExecMode::Strict)?;
    let rb = exec_trace(c, s0, &trace_events(events, &w.trace_b), ExecMode::Strict)?;
    Ok(ra.valid
        && rb.valid
        && output_of(&ra.final_state, compare_transfers) == w.output_a
        && output_of(&rb.final_state, compare_transfers) == w.output_b
        && w.output_a != w.output_b)
}

/// Executes every HB-respecting trace of every subset and reports output
/// divergence between valid permutations of the same subset.
pub fn find_eo_bugs(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    r: &HbRelation,
    cfg: &FuzzConfig,
) -> Result<FuzzResult, FuzzError> {
    if events.len() > MAX_EVENTS {
        return Err(FuzzError::TooManyEvents(events.len()));
    }
    if cfg.kmin < 2 || cfg.kmax < cfg.kmin {
        return Err(FuzzError::BadLengths(cfg.kmin, cfg.kmax));
    }
    let deadline = cfg.timeout.map(|t| Instant::now() + t);
    let names: Vec<&str> = events.iter().map(|e| e.func.as_str()).collect();
    let subsets = ordered_subsets(&names, cfg.kmin, cfg.kmax);

    let mut stats = FuzzStats::default();
    let mut witnesses = Vec::new();
    let mut truncated = None;
    let chunk = 16 * rayon::current_num_threads().max(1);

    'chunks: for batch in subsets.chunks(chunk) {
        // The trace cap is applied up front so the cut is deterministic.
        let mut take = batch.len();
        if let Some(cap) = cfg.max_traces {
            let mut seen = stats.traces_enumerated;
            for (i, s) in batch.iter().enumerate() {
                seen += count_extensions(&members(*s), r);
                if seen > cap {
                    take = i;
                    truncated = Some(Truncation::TraceCap);
                    break;
                }
            }
        }
        let results: Vec<Option<SubsetResult>> = batch[..take]
            .par_iter()
            .map(|s| {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    return Ok(None);
                }
                run_subset(c, s0, events, r, cfg, *s).map(Some)
            })
            .collect::<Result<_, VmError>>()?;
        for res in results {
            let Some(res) = res else {
                truncated = Some(Truncation::Timeout);
                break 'chunks;
            };
            stats.subsets_visited += 1;
            stats.traces_enumerated += res.enumerated;
            stats.traces_skipped_by_hb += res.skipped;
            stats.traces_valid += res.valid;
            stats.witnesses_found += res.witnesses.len() as u64;
            witnesses.extend(res.witnesses);
        }
        if truncated.is_some() {
            break;
        }
    }
    Ok(FuzzResult {
        witnesses,
        stats,
        truncated,
    })
}

struct SubsetResult {
    enumerated: u64,
    skipped: u64,
    valid: u64,
    witnesses: Vec<Witness>,
}

fn run_subset(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    r: &HbRelation,
    cfg: &FuzzConfig,
    subset: Subset,
) -> Result<SubsetResult, VmError> {
    let idx = members(subset);
    let k = idx.len();
    let enumerated = count_extensions(&idx, r);
    let factorial: u64 = (1..=k as u64).product();

    let preds = enumerate::local_preds(&idx, r);
    let mut finished = Vec::new();
    let mut walker = Walker {
        c,
        events,
        idx: &idx,
        preds: &preds,
        compare_transfers: cfg.compare_transfers,
        trace: Vec::with_capacity(k),
        out: &mut finished,
    };
    walker.go(0, s0)?;

    let repeated: Vec<bool> = idx
        .iter()
        .map(|&i| idx.iter().filter(|&&j| events[j].func == events[i].func).count() > 1)
        .collect();
    let mut partitions: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (t, (trace, _)) in finished.iter().enumerate() {
        let key = if cfg.cross_entry {
            Vec::new()
        } else {
            trace
                .iter()
                .copied()
                .filter(|e| repeated[idx.binary_search(e).expect("member")])
                .collect()
        };
        partitions.entry(key).or_default().push(t);
    }

    // Report witnesses in the order their second trace was enumerated.
    let mut found: Vec<(usize, usize)> = Vec::new();
    for members in partitions.values() {
        if cfg.pairwise {
            for (x, &a) in members.iter().enumerate() {
                for &b in &members[x + 1..] {
                    if finished[a].1 != finished[b].1 {
                        found.push((a, b));
                    }
                }
            }
        } else {
            let a = members[0];
            for &b in &members[1..] {
                if finished[a].1 != finished[b].1 {
                    found.push((a, b));
                }
            }
        }
    }
    found.sort_by_key(|&(a, b)| (b, a));
    found.truncate(cfg.witness_cap);
    let witnesses = found
        .into_iter()
        .map(|(a, b)| Witness {
            trace_a: finished[a].0.clone(),
            trace_b: finished[b].0.clone(),
            output_a: finished[a].1.clone(),
            output_b: finished[b].1.clone(),
        })
        .collect();

    Ok(SubsetResult {
        enumerated,
        skipped: factorial - enumerated,
        valid: finished.len() as u64,
        witnesses,
    })
}

/// Depth-first walk over linear extensions, sharing state between traces
/// with a common prefix and pruning below the first revert.
struct Walker<'a> {
    c: &'a ContractDef,
    events: &'a [Event],
    idx: &'a [usize],
    preds: &'a [u32],
    compare_transfers: bool,
    trace: Vec<usize>,
    out: &'a mut Vec<(Vec<usize>, Output)>,
}

impl Walker<'_> {
    fn go(&mut self, placed: u32, state: &WorldState) -> Result<(), VmError> {
        if self.trace.len() == self.idx.len() {
            self.out
                .push((self.trace.clone(), output_of(state, self.compare_transfers)));
            return Ok(());
        }
        for p in 0..self.idx.len() {
            if placed >> p & 1 == 1 || self.preds[p] & !placed != 0 {
                continue;
            }
            let e = self.idx[p];
            if let RunOutcome::Ok(next) = exec_event(self.c, state, &self.events[e])? {
                self.trace.push(e);
                self.go(placed | 1 << p, &next)?;
                self.trace.pop();
            }
        }
        Ok(())
    }
}
