//! Weak happens-before extraction at a fixed starting state.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::effects::is_candidate;
use crate::lang::ContractDef;
use crate::vm::{exec_trace, Event, ExecMode, Value, VmError, WorldState};

/// Ordered pairs `(i, j)`: event `i` must precede event `j`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HbRelation {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl HbRelation {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> HbRelation {
        HbRelation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.pairs
            .iter()
            .all(|&(i, j)| i != j && !self.pairs.contains(&(j, i)))
    }
}

/// True iff neither order is forced.
pub fn independent(i: usize, j: usize, r: &HbRelation) -> bool {
    !r.contains(i, j) && !r.contains(j, i)
}

/// Which event pairs of candidate functions get probed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ProbePolicy {
    /// Pairs whose integer arguments agree, or where either event has none.
    /// Events produced for one pair of functions share their concrete
    /// amounts, so only such pairs are related.
    #[default]
    ValueCoherent,
    /// Every pair of events whose functions are candidates.
    AllPairs,
}

fn uint_args(e: &Event) -> BTreeSet<primitive_types::U256> {
    e.msg
        .args
        .iter()
        .filter_map(|v| match v {
            Value::Uint(x) => Some(*x),
            _ => None,
        })
        .collect()
}

fn coherent(a: &Event, b: &Event) -> bool {
    let (x, y) = (uint_args(a), uint_args(b));
    x.is_empty() || y.is_empty() || x == y
}

/// Event index pairs `(i, j)`, `i < j`, that [`extract_whb`] will execute.
pub fn probe_pairs(
    events: &[Event],
    candidates: &BTreeSet<(String, String)>,
    policy: ProbePolicy,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..events.len() {
        for j in i + 1..events.len() {
            let (a, b) = (&events[i], &events[j]);
            if !is_candidate(candidates, &a.func, &b.func) {
                continue;
            }
            if policy == ProbePolicy::ValueCoherent && !coherent(a, b) {
                continue;
            }
            out.push((i, j));
        }
    }
    out
}

/// Runs both orders of every probed pair from `s0`; records `(i, j)` when
/// only `[e_i, e_j]` is valid.
pub fn extract_whb(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    candidates: &BTreeSet<(String, String)>,
    policy: ProbePolicy,
) -> Result<HbRelation, VmError> {
    let probes = probe_pairs(events, candidates, policy);
    let found = probes
        .par_iter()
        .map(|&(i, j)| -> Result<Option<(usize, usize)>, VmError> {
            let (a, b) = (&events[i], &events[j]);
            let ab = exec_trace(c, s0, &[a.clone(), b.clone()], ExecMode::Strict)?.valid;
            let ba = exec_trace(c, s0, &[b.clone(), a.clone()], ExecMode::Strict)?.valid;
            Ok(match (ab, ba) {
                (true, false) => Some((i, j)),
                (false, true) => Some((j, i)),
                _ => None,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let r = HbRelation::new(found.into_iter().flatten());
    debug_assert!(r.is_antisymmetric());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::hb_candidate_pairs;
    use crate::lang::parse;
    use crate::vm::Message;
    use primitive_types::{H160, U256};

    const C: &str = r#"
        contract T {
            uint256 credit;
            uint256 other;
            function give(uint256 v) { credit = v; }
            function take(uint256 v) { require(credit >= v); credit -= v; }
            function touch() { other = 1; }
        }"#;

    fn ev(func: &str, args: &[u64]) -> Event {
        Event {
            func: func.into(),
            msg: Message {
                sender: H160::repeat_byte(1),
                value: U256::zero(),
                args: args.iter().map(|v| Value::Uint(U256::from(*v))).collect(),
                timestamp: U256::zero(),
                blocknumber: U256::zero(),
            },
        }
    }

    #[test]
    fn orders_give_before_take() {
        let c = parse(C).unwrap();
        let s0 = WorldState::initial(&c);
        let events = vec![ev("take", &[2]), ev("touch", &[]), ev("give", &[2]), ev("give", &[5])];
        let cands = hb_candidate_pairs(&c);
        let r = extract_whb(&c, &s0, &events, &cands, ProbePolicy::ValueCoherent).unwrap();
        assert_eq!(r, HbRelation::new([(2, 0)]));
        let all = extract_whb(&c, &s0, &events, &cands, ProbePolicy::AllPairs).unwrap();
        assert_eq!(all, HbRelation::new([(2, 0), (3, 0)]));
        assert!(independent(1, 2, &all));
        assert!(!independent(0, 3, &all));
    }

    #[test]
    fn non_candidates_never_probed() {
        let c = parse(C).unwrap();
        let events = vec![ev("touch", &[]), ev("give", &[1])];
        assert!(probe_pairs(&events, &hb_candidate_pairs(&c), ProbePolicy::AllPairs).is_empty());
    }

    #[test]
    fn both_invalid_yields_nothing() {
        let c = parse(C).unwrap();
        let s0 = WorldState::initial(&c);
        let events = vec![ev("take", &[1]), ev("take", &[1])];
        let r = extract_whb(&c, &s0, &events, &hb_candidate_pairs(&c), ProbePolicy::AllPairs).unwrap();
        assert!(r.pairs.is_empty());
    }
}
