mod common;

use common::{names, run};
use eorder_core::hb::ProbePolicy;
use eorder_core::report::{AnalyzeOptions, Mode};

fn opts() -> AnalyzeOptions {
    AnalyzeOptions::default()
}

#[test]
fn iou_events_mirror_the_appendix_listing() {
    let a = run("iou", &opts());
    let text: Vec<&str> = a.report.events.iter().map(|e| e.text.as_str()).collect();
    assert_eq!(
        text,
        vec![
            "transfer(S, 1) from O",
            "approve(S, 1) from O",
            "approve(S, 3) from O",
            "transferFrom(O, S, 1) from S",
            "transferFrom(O, S, 3) from S",
            "transferFrom(O, O, 1) from S",
            "transferFrom(O, O, 3) from S",
        ]
    );
    assert_eq!(a.report.events[1].timestamp, "1515978781");
}

#[test]
fn iou_stats_and_outputs() {
    let a = run("iou", &opts());
    let st = &a.report.sync.as_ref().unwrap().stats;
    assert_eq!(st["traces_enumerated"], "2560");
    assert_eq!(st["traces_skipped_by_hb"], (8652 - 2560).to_string());
    assert_eq!(st["traces_valid"], "168");
    assert_eq!(st["minimized_count"], "1");
    assert_eq!(a.full.len(), 10);
    let w = &a.minimized[0];
    assert_eq!((w.trace_a.clone(), w.trace_b.clone()), (vec![1, 2, 3], vec![1, 3, 2]));
    let allowance = |o: &eorder_core::vm::Output| {
        o.to_json()["fields"]["allowed"]
            .as_object()
            .unwrap()
            .values()
            .next()
            .unwrap()
            .as_object()
            .unwrap()
            .values()
            .next()
            .unwrap()
            .clone()
    };
    assert_eq!(allowance(&w.output_a), "2");
    assert_eq!(allowance(&w.output_b), "3");
}

#[test]
fn iou_all_pairs_probing_adds_cross_value_pairs() {
    let a = run(
        "iou",
        &AnalyzeOptions {
            probe: ProbePolicy::AllPairs,
            ..opts()
        },
    );
    let hb: Vec<(usize, usize)> = a.report.hb.iter().map(|h| (h.before, h.after)).collect();
    assert_eq!(hb, vec![(1, 3), (1, 5), (2, 3), (2, 4), (2, 5), (2, 6)]);
}

#[test]
fn iou_pairwise_and_cross_entry_only_add_witnesses() {
    let base = run("iou", &opts());
    let wide = run(
        "iou",
        &AnalyzeOptions {
            pairwise: true,
            cross_entry: true,
            ..opts()
        },
    );
    assert!(wide.full.len() >= base.full.len());
    assert!(wide.minimized.len() >= base.minimized.len());
}

#[test]
fn trace_cap_is_reported() {
    let a = run(
        "iou",
        &AnalyzeOptions {
            max_traces: Some(100),
            ..opts()
        },
    );
    let sync = a.report.sync.as_ref().unwrap();
    assert!(sync.truncated.is_some());
    assert!(sync.stats["traces_enumerated"].parse::<u64>().unwrap() <= 100);
}

#[test]
fn casino_sync_and_lin() {
    let a = run("casino", &opts());
    assert_eq!(a.report.settings.mode, Mode::Both);
    assert_eq!(a.violations.len(), 1);
    let lin = a.report.lin.as_ref().unwrap();
    assert_eq!(lin.stats["interleavings"], "6");
    assert_eq!(lin.stats["canonical_outputs"], "2");
    let v = &lin.violations[0];
    assert_eq!(v.flagged.schedule, ["call 0", "call 1", "return 0", "return 1"]);
    assert_eq!(v.closest_linearizable.schedule, ["call 0", "return 0", "call 1", "return 1"]);
    assert_eq!(v.closest_linearizable.statuses, ["ok", "ok", "reverted: ExplicitThrow"]);
    assert_eq!(v.flagged.output.state["balance"], "2");
    assert_eq!(v.closest_linearizable.output.state["balance"], "1");
    assert_eq!(v.pairing.len(), 2);
}

#[test]
fn casino_losing_results_are_benign() {
    let mut sc = common::scenario("casino");
    sc["callback_results"] = serde_json::json!(["7"]);
    let a = eorder_core::report::analyze(
        &common::source("casino"),
        &sc,
        &AnalyzeOptions {
            mode: Some(Mode::Lin),
            ..opts()
        },
    )
    .unwrap();
    assert!(a.violations.is_empty());
}

#[test]
fn gamble_out_of_order_callbacks_flagged() {
    let a = run(
        "gamble",
        &AnalyzeOptions {
            mode: Some(Mode::Lin),
            ..opts()
        },
    );
    assert_eq!(a.violations.len(), 1);
    let v = &a.violations[0];
    assert_eq!(v.flagged.events.len(), 4);
    assert!(v.counterpart.statuses.iter().all(|s| *s == eorder_core::vm::EventStatus::Ok));
}

#[test]
fn escrow_minimal_race() {
    let a = run("escrow", &opts());
    assert_eq!(a.minimized.len(), 1);
    let w = &a.minimized[0];
    assert_eq!(names(&a, &w.trace_a), ["setEscrowFee", "newEscrow"]);
    assert_eq!(names(&a, &w.trace_b), ["newEscrow", "setEscrowFee"]);
    assert_eq!(w.output_a.to_json()["fields"]["amount"], "990");
    assert_eq!(w.output_b.to_json()["fields"]["amount"], "1000");
}

#[test]
fn contest_lucky_voter_race() {
    let a = run("contest", &opts());
    let shapes: Vec<(Vec<String>, Vec<String>)> = a
        .minimized
        .iter()
        .map(|w| (names(&a, &w.trace_a), names(&a, &w.trace_b)))
        .collect();
    assert!(shapes.contains(&(
        vec!["participate".into(), "vote".into(), "determineLuckyVoters".into()],
        vec!["participate".into(), "determineLuckyVoters".into(), "vote".into()],
    )));
    assert_eq!(a.minimized.len(), 3);
}

#[test]
fn bounty_donate_before_payout() {
    let a = run("bounty", &opts());
    let pairs: Vec<(String, String)> = a
        .report
        .hb
        .iter()
        .map(|h| (a.events[h.before].func.clone(), a.events[h.after].func.clone()))
        .collect();
    assert!(pairs.iter().all(|p| p.0 == "donate" && p.1 == "payout"));
    assert_eq!(pairs.len(), 2);
    assert!(a.minimized.is_empty());
}

#[test]
fn empty_is_clean() {
    let a = run("empty", &opts());
    assert_eq!(a.report.bug_count(), 0);
    assert!(a.events.is_empty());
    assert_eq!(a.report.pure_functions, ["ping"]);
}

#[test]
fn lin_mode_needs_a_callback() {
    let r = eorder_core::report::analyze(
        &common::source("iou"),
        &common::scenario("iou"),
        &AnalyzeOptions {
            mode: Some(Mode::Lin),
            ..opts()
        },
    );
    assert!(r.is_err());
}
