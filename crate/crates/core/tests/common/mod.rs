#![allow(dead_code)]

use std::path::PathBuf;

use eorder_core::events::Scenario;
use eorder_core::lang::{parse, ContractDef, ScalarType};
use eorder_core::report::{analyze, Analysis, AnalyzeOptions};
use eorder_core::vm::{exec_event, Event, Message, RunOutcome, Value, WorldState};
use primitive_types::{H160, U256};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(format!("{name}.fsol"))).unwrap()
}

pub fn scenario(name: &str) -> Json {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.scenario.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn run(name: &str, opts: &AnalyzeOptions) -> Analysis {
    analyze(&source(name), &scenario(name), opts).unwrap()
}

pub fn names(a: &Analysis, trace: &[usize]) -> Vec<String> {
    trace.iter().map(|&i| a.events[i].func.clone()).collect()
}

pub const CORPUS: &[&str] = &["iou", "casino", "bounty", "escrow", "contest", "gamble", "empty"];

/// Contract with both pure and state-touching functions, used by the
/// randomised probes.
pub const MIXED: &str = r#"
contract Mixed {
    mapping(address => uint256) credit;
    uint256[] log;
    uint256 total;
    bool frozen;

    function add(uint256 a, uint256 b) { uint256 c = a + b; require(c >= a); }
    function check(uint256 a) { require(a > 1); }
    function noop() {}
    function deposit(uint256 v) payable {
        require(!frozen);
        credit[msg.sender] += v;
        total += v;
    }
    function withdraw(uint256 v) {
        require(credit[msg.sender] >= v);
        credit[msg.sender] -= v;
        total -= v;
        send(msg.sender, v);
    }
    function record(uint256 v) {
        require(v != 2);
        log.push(v);
    }
    function freeze(bool f) { frozen = f; }
    function divide(uint256 d) { total = total / d; }
    function pick(uint256 i) { total = log[i]; }
}
"#;

pub struct Fixture {
    pub contract: ContractDef,
    pub s0: WorldState,
    pub senders: Vec<H160>,
}

pub fn senders() -> Vec<H160> {
    (1..=3u8).map(H160::repeat_byte).collect()
}

pub fn mixed() -> Fixture {
    let contract = parse(MIXED).unwrap();
    let mut s0 = WorldState::initial(&contract);
    s0.balance = 50.into();
    for a in senders() {
        s0.ext_balances.insert(a, 20.into());
    }
    Fixture {
        contract,
        s0,
        senders: senders(),
    }
}

/// Every corpus contract plus the mixed one, each with its scenario state.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = vec![mixed()];
    for name in CORPUS {
        let c = parse(&source(name)).unwrap();
        let sc = Scenario::from_json(&scenario(name)).unwrap();
        let s0 = sc.initial_state(&c, None).unwrap();
        let accounts = sc.accounts().unwrap();
        out.push(Fixture {
            contract: c,
            s0,
            senders: accounts.all().map(|(_, a)| a).collect(),
        });
    }
    out
}

pub fn random_event(rng: &mut ChaCha8Rng, f: &Fixture) -> Option<Event> {
    if f.contract.functions.is_empty() {
        return None;
    }
    let func = &f.contract.functions[rng.gen_range(0..f.contract.functions.len())];
    let args = func
        .params
        .iter()
        .map(|p| match p.ty {
            ScalarType::Uint => Value::Uint(U256::from(rng.gen_range(0u64..5))),
            ScalarType::Bool => Value::Bool(rng.gen()),
            ScalarType::Address => Value::Addr(f.senders[rng.gen_range(0..f.senders.len())]),
        })
        .collect();
    let value = if func.payable && rng.gen_bool(0.5) {
        U256::from(rng.gen_range(1u64..4))
    } else {
        U256::zero()
    };
    Some(Event {
        func: func.name.clone(),
        msg: Message {
            sender: f.senders[rng.gen_range(0..f.senders.len())],
            value,
            args,
            timestamp: U256::from(rng.gen_range(0u64..3000)),
            blocknumber: U256::from(rng.gen_range(0u64..10)),
        },
    })
}

/// A state reached from the fixture's start by up to `n` random events.
pub fn random_state(rng: &mut ChaCha8Rng, f: &Fixture, n: usize) -> WorldState {
    let mut s = f.s0.clone();
    for _ in 0..rng.gen_range(0..=n) {
        let Some(e) = random_event(rng, f) else { break };
        if let Ok(RunOutcome::Ok(next)) = exec_event(&f.contract, &s, &e) {
            s = next;
        }
    }
    s
}

pub fn random_trace(rng: &mut ChaCha8Rng, f: &Fixture, n: usize) -> Vec<Event> {
    (0..rng.gen_range(1..=n))
        .filter_map(|_| random_event(rng, f))
        .collect()
}

pub mod suites {
    use super::*;
    use eorder_core::effects::pure_events_filter;
    use eorder_core::fuzzer::{count_traces, enumerate_traces, verify_witness, Witness};
    use eorder_core::hb::HbRelation;
    use eorder_core::linearizer::verify_violation;
    use eorder_core::vm::{exec_trace, output_of, ExecMode};
    use rand::SeedableRng;
    use std::collections::BTreeSet;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Reverting events leave the state untouched. Returns how many of
    /// the probes reverted.
    pub fn atomicity(probes: usize, seed: u64) -> Result<usize, String> {
        let fx = fixtures();
        let mut rng = rng(seed);
        let mut reverted = 0;
        for i in 0..probes {
            let f = &fx[rng.gen_range(0..fx.len())];
            let s = random_state(&mut rng, f, 4);
            let Some(e) = random_event(&mut rng, f) else { continue };
            let out = exec_trace(&f.contract, &s, std::slice::from_ref(&e), ExecMode::Tolerant)
                .map_err(|err| format!("probe {i}: {err}"))?;
            if !out.valid {
                reverted += 1;
                if out.final_state != s || output_of(&out.final_state, true) != output_of(&s, true) {
                    return Err(format!("probe {i}: revert of {e} changed the state"));
                }
            }
        }
        Ok(reverted)
    }

    pub fn determinism(traces: usize, seed: u64) -> Result<(), String> {
        let fx = fixtures();
        let mut rng = rng(seed);
        for i in 0..traces {
            let f = &fx[rng.gen_range(0..fx.len())];
            let t = random_trace(&mut rng, f, 6);
            let again = parse(&eorder_core::lang::print_contract(&f.contract)).unwrap();
            for mode in [ExecMode::Strict, ExecMode::Tolerant] {
                let a = exec_trace(&f.contract, &f.s0, &t, mode).unwrap();
                let b = exec_trace(&again, &f.s0, &t, mode).unwrap();
                if a != b || output_of(&a.final_state, true).hash() != output_of(&b.final_state, true).hash() {
                    return Err(format!("trace {i} replayed differently"));
                }
            }
        }
        Ok(())
    }

    fn check_relation(n: usize, r: &HbRelation) -> Result<(), String> {
        let names: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let traces = enumerate_traces(&refs, r, 2, n);
        let distinct: BTreeSet<&Vec<usize>> = traces.iter().collect();
        if distinct.len() != traces.len() {
            return Err(format!("duplicate traces for {:?}", r.pairs));
        }
        for t in &traces {
            for (a, &x) in t.iter().enumerate() {
                for &y in &t[a + 1..] {
                    if r.contains(y, x) {
                        return Err(format!("{t:?} violates {:?}", r.pairs));
                    }
                }
            }
        }
        let brute = count_traces(n, r, 2, n);
        if brute != traces.len() as u64 {
            return Err(format!("n={n} {:?}: enumerated {} vs brute force {brute}", r.pairs, traces.len()));
        }
        Ok(())
    }

    /// Every antisymmetric relation for n <= 5, then random ones at n = 6.
    /// Returns the number of relations checked.
    pub fn enumeration_equivalence(random_cases: usize, seed: u64) -> Result<usize, String> {
        let mut checked = 0;
        for n in 0..=5usize {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let total = 3usize.pow(pairs.len() as u32);
            for code in 0..total {
                let mut c = code;
                let mut r = Vec::new();
                for &(i, j) in &pairs {
                    match c % 3 {
                        1 => r.push((i, j)),
                        2 => r.push((j, i)),
                        _ => {}
                    }
                    c /= 3;
                }
                check_relation(n, &HbRelation::new(r))?;
                checked += 1;
            }
        }
        let mut rng = rng(seed);
        for _ in 0..random_cases {
            let mut r = Vec::new();
            for i in 0..6 {
                for j in i + 1..6 {
                    match rng.gen_range(0..3) {
                        1 => r.push((i, j)),
                        2 => r.push((j, i)),
                        _ => {}
                    }
                }
            }
            check_relation(6, &HbRelation::new(r))?;
            checked += 1;
        }
        Ok(checked)
    }

    fn one_minimal(a: &Analysis, w: &Witness) -> bool {
        w.trace_a.iter().all(|&e| {
            let wa: Vec<usize> = w.trace_a.iter().copied().filter(|&x| x != e).collect();
            let wb: Vec<usize> = w.trace_b.iter().copied().filter(|&x| x != e).collect();
            let run = |t: &[usize]| {
                let evs: Vec<Event> = t.iter().map(|&i| a.events[i].clone()).collect();
                let o = exec_trace(&a.contract, &a.s0, &evs, ExecMode::Strict).unwrap();
                o.valid.then(|| output_of(&o.final_state, false))
            };
            match (run(&wa), run(&wb)) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            }
        })
    }

    /// Re-checks every reported witness and lin violation of the corpus.
    /// Returns the number checked.
    pub fn witness_soundness() -> Result<usize, String> {
        let mut checked = 0;
        for name in CORPUS {
            let a = run(name, &AnalyzeOptions::default());
            for w in a.full.iter().chain(&a.minimized) {
                if !verify_witness(&a.contract, &a.s0, &a.events, w, false).unwrap() {
                    return Err(format!("{name}: witness {:?} / {:?} does not replay", w.trace_a, w.trace_b));
                }
                checked += 1;
            }
            for w in &a.minimized {
                if w.trace_a.len() < 2 || !one_minimal(&a, w) {
                    return Err(format!("{name}: minimized witness {:?} can shrink further", w.trace_a));
                }
            }
            for v in &a.violations {
                if !verify_violation(&a.contract, &a.s0, v, false).unwrap() {
                    return Err(format!("{name}: lin violation does not replay"));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// Events of functions classified as pure never change the output.
    pub fn purity_exclusion(probes: usize, seed: u64) -> Result<(), String> {
        let fx: Vec<Fixture> = fixtures()
            .into_iter()
            .filter(|f| !pure_events_filter(&f.contract).is_empty())
            .collect();
        let mut rng = rng(seed);
        let mut done = 0;
        while done < probes {
            let f = &fx[rng.gen_range(0..fx.len())];
            let pure = pure_events_filter(&f.contract);
            let s = random_state(&mut rng, f, 4);
            let Some(e) = random_event(&mut rng, f) else { continue };
            if !pure.contains(&e.func) {
                continue;
            }
            done += 1;
            let out = exec_trace(&f.contract, &s, std::slice::from_ref(&e), ExecMode::Tolerant).unwrap();
            if output_of(&out.final_state, true) != output_of(&s, true) {
                return Err(format!("pure event {e} changed the output"));
            }
        }
        Ok(())
    }
}
