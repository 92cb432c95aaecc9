use std::collections::BTreeSet;

use crate::lang::ContractDef;
use crate::vm::{exec_trace, output_of, Event, ExecMode, Output, VmError, WorldState};

use super::{trace_events, Witness};

fn run(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    trace: &[usize],
    compare_transfers: bool,
) -> Result<Option<Output>, VmError> {
    let out = exec_trace(c, s0, &trace_events(events, trace), ExecMode::Strict)?;
    Ok(out
        .valid
        .then(|| output_of(&out.final_state, compare_transfers)))
}

/// Drops events from both traces while both stay valid and still disagree.
/// Scans `trace_a` left to right and restarts after each removal.
pub fn minimize(
    c: &ContractDef,
    s0: &WorldState,
    events: &[Event],
    w: &Witness,
    compare_transfers: bool,
) -> Result<Witness, VmError> {
    let mut cur = w.clone();
    'outer: loop {
        if cur.trace_a.len() <= 2 {
            return Ok(cur);
        }
        for pos in 0..cur.trace_a.len() {
            let e = cur.trace_a[pos];
            let a: Vec<usize> = cur.trace_a.iter().copied().filter(|&x| x != e).collect();
            let b: Vec<usize> = cur.trace_b.iter().copied().filter(|&x| x != e).collect();
            let (Some(oa), Some(ob)) = (
                run(c, s0, events, &a, compare_transfers)?,
                run(c, s0, events, &b, compare_transfers)?,
            ) else {
                continue;
            };
            if oa != ob {
                cur = Witness {
                    trace_a: a,
                    trace_b: b,
                    output_a: oa,
                    output_b: ob,
                };
                continue 'outer;
            }
        }
        return Ok(cur);
    }
}

/// Keeps the first witness for each unordered pair of function-name sequences.
pub fn dedupe_witnesses(events: &[Event], ws: Vec<Witness>) -> Vec<Witness> {
    let names = |t: &[usize]| -> Vec<String> { t.iter().map(|&i| events[i].func.clone()).collect() };
    let mut seen = BTreeSet::new();
    ws.into_iter()
        .filter(|w| {
            let (a, b) = (names(&w.trace_a), names(&w.trace_b));
            let key = if a <= b { (a, b) } else { (b, a) };
            seen.insert(key)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use crate::vm::{Message, Value};
    use primitive_types::{H160, U256};

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

    const C: &str = r#"contract C {
        uint256 x; uint256 y; uint256 z;
        function set(uint256 a) { x = a; }
        function copy() { y = x; }
        function noise() { z += 1; }
    }"#;

    fn witness(c: &ContractDef, s0: &WorldState, events: &[Event], a: Vec<usize>, b: Vec<usize>) -> Witness {
        Witness {
            output_a: run(c, s0, events, &a, false).unwrap().unwrap(),
            output_b: run(c, s0, events, &b, false).unwrap().unwrap(),
            trace_a: a,
            trace_b: b,
        }
    }

    #[test]
    fn drops_irrelevant_events() {
        let c = parse(C).unwrap();
        let s0 = WorldState::initial(&c);
        let events = vec![ev("noise", &[]), ev("set", &[4]), ev("copy", &[])];
        let w = witness(&c, &s0, &events, vec![0, 1, 2], vec![2, 0, 1]);
        let m = minimize(&c, &s0, &events, &w, false).unwrap();
        assert_eq!((m.trace_a, m.trace_b), (vec![1, 2], vec![2, 1]));
        assert_ne!(m.output_a, m.output_b);
    }

    #[test]
    fn never_shorter_than_two() {
        let c = parse(C).unwrap();
        let s0 = WorldState::initial(&c);
        let events = vec![ev("set", &[4]), ev("copy", &[])];
        let w = witness(&c, &s0, &events, vec![0, 1], vec![1, 0]);
        assert_eq!(minimize(&c, &s0, &events, &w, false).unwrap(), w);
    }

    #[test]
    fn dedupe_ignores_argument_values_and_direction() {
        let c = parse(C).unwrap();
        let s0 = WorldState::initial(&c);
        let events = vec![ev("set", &[4]), ev("copy", &[]), ev("set", &[5])];
        let ws = vec![
            witness(&c, &s0, &events, vec![0, 1], vec![1, 0]),
            witness(&c, &s0, &events, vec![1, 2], vec![2, 1]),
        ];
        assert_eq!(dedupe_witnesses(&events, ws).len(), 1);
    }
}
