mod common;

use std::collections::{BTreeSet, HashMap};

use hitl_core::matching::{iou, match_events};
use hitl_core::metrics::{cronbach_alpha, LatencyStats, SurveyResponseSet};
use hitl_core::sim::{run_simulation, EntryKind, EventId, LabelOutcome, LabelValue, OperatorId, SimState, Timestamp};
use hitl_core::{extract_events, postprocess_with, smooth_with, EventInterval, FrameSeries, SmoothingMode};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn flags() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, 0..120)
}

fn mode() -> impl Strategy<Value = SmoothingMode> {
    prop_oneof![Just(SmoothingMode::Replace), Just(SmoothingMode::SetOnly)]
}

fn interval() -> impl Strategy<Value = (u64, u64)> {
    (0u64..200, 0u64..40).prop_map(|(s, len)| (s, s + len))
}

fn interval_list() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec(interval(), 0..7)
}

proptest! {
    #[test]
    fn smoothing_keeps_length_and_fills_rows(f in flags(), m in mode()) {
        let out = smooth_with(&common::series(&f), m).to_flags();
        prop_assert_eq!(out.len(), f.len());
        for chunk in out.chunks(3) {
            prop_assert!(chunk.iter().all(|&v| v == chunk[0]) || m == SmoothingMode::SetOnly);
        }
    }

    #[test]
    fn set_only_never_clears(f in flags()) {
        let out = smooth_with(&common::series(&f), SmoothingMode::SetOnly).to_flags();
        prop_assert!(f.iter().zip(&out).all(|(&a, &b)| b >= a));
        let replace = smooth_with(&common::series(&f), SmoothingMode::Replace).to_flags();
        prop_assert!(replace.iter().zip(&out).all(|(&r, &s)| s >= r));
    }

    #[test]
    fn extraction_round_trips(f in flags()) {
        let s = common::series(&f);
        let events = extract_events(&s);
        let pairs: Vec<_> = events.iter().map(|e| (e.start(), e.end())).collect();
        prop_assert_eq!(pairs, common::runs_oracle(&f));
        prop_assert_eq!(FrameSeries::from_intervals(&events, f.len()), s);
    }

    #[test]
    fn postprocess_is_smooth_then_extract(f in flags(), m in mode()) {
        let s = common::series(&f);
        prop_assert_eq!(postprocess_with(&s, m), extract_events(&smooth_with(&s, m)));
    }

    #[test]
    fn iou_symmetric_and_bounded(a in interval(), b in interval()) {
        let (ia, ib) = (EventInterval::new(a.0, a.1).unwrap(), EventInterval::new(b.0, b.1).unwrap());
        let v = iou(&ia, &ib);
        prop_assert_eq!(v, iou(&ib, &ia));
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v == 1.0, a == b);
        prop_assert!((v - common::iou_oracle(a, b)).abs() < 1e-12);
    }

    #[test]
    fn matching_conserves_counts(gt in interval_list(), pred in interval_list(), thr in 0.0f64..1.0) {
        let r = match_events(&common::intervals(&gt), &common::intervals(&pred), thr).unwrap();
        prop_assert_eq!(r.tp + r.fp, pred.len());
        prop_assert_eq!(r.tp + r.fn_, gt.len());
        let gi: BTreeSet<_> = r.matches.iter().map(|m| m.gt_index).collect();
        let pi: BTreeSet<_> = r.matches.iter().map(|m| m.pred_index).collect();
        prop_assert_eq!(gi.len(), r.tp);
        prop_assert_eq!(pi.len(), r.tp);
        prop_assert!(r.matches.iter().all(|m| m.iou > thr));
        prop_assert!(r.tp <= common::max_matching_oracle(&gt, &pred, thr));
    }

    #[test]
    fn matching_ignores_input_order(
        gt in interval_list().prop_shuffle(),
        pred in interval_list(),
    ) {
        let mut sorted = gt.clone();
        sorted.sort();
        let a = match_events(&common::intervals(&gt), &common::intervals(&pred), 0.5).unwrap();
        let b = match_events(&common::intervals(&sorted), &common::intervals(&pred), 0.5).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn raising_threshold_never_adds_matches(gt in interval_list(), pred in interval_list(), lo in 0.0f64..1.0, d in 0.0f64..0.5) {
        let (g, p) = (common::intervals(&gt), common::intervals(&pred));
        let low = match_events(&g, &p, lo).unwrap();
        let high = match_events(&g, &p, (lo + d).min(0.999)).unwrap();
        prop_assert!(high.tp <= low.tp);
    }

    #[test]
    fn latency_stats_are_ordered(samples in prop::collection::vec(0.0f64..1e4, 1..100)) {
        let s = LatencyStats::from_samples(&samples);
        let (med, p90, p99, max) = (s.median_s.unwrap(), s.p90_s.unwrap(), s.p99_s.unwrap(), s.max_s.unwrap());
        prop_assert!(med <= p90 && p90 <= p99 && p99 <= max);
        prop_assert_eq!(p99, common::percentile_oracle(&samples, 99));
    }

    #[test]
    fn alpha_ignores_item_shift(
        rows in prop::collection::vec(prop::collection::vec(2i64..=6, 3), 3..12),
        item in 0usize..3,
        shift in -1i64..=1,
    ) {
        let names: Vec<String> = (0..3).map(|i| format!("q{i}")).collect();
        let base = SurveyResponseSet::new(names.clone(), rows.clone(), BTreeSet::new(), 1, 7).unwrap();
        let moved: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &x)| if j == item { x + shift } else { x }).collect())
            .collect();
        let moved = SurveyResponseSet::new(names, moved, BTreeSet::new(), 1, 7).unwrap();
        match (cronbach_alpha(&base), cronbach_alpha(&moved)) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a - b).abs() < 1e-9);
                prop_assert!((a - common::alpha_oracle(&rows)).abs() < 1e-9);
            }
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "definedness changed: {:?}", other),
        }
    }

    #[test]
    fn reverse_coding_twice_is_identity(
        rows in prop::collection::vec(prop::collection::vec(1i64..=5, 4), 0..10),
        reverse in subsequence(vec![0usize, 1, 2, 3], 0..=4),
    ) {
        let names: Vec<String> = (0..4).map(|i| format!("i{i}")).collect();
        let reverse: BTreeSet<usize> = reverse.into_iter().collect();
        let once = SurveyResponseSet::new(names.clone(), rows.clone(), reverse.clone(), 1, 5).unwrap();
        let twice = SurveyResponseSet::new(names, once.corrected_rows(), reverse, 1, 5).unwrap();
        prop_assert_eq!(twice.corrected_rows(), rows);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulated_logs_are_causal(seed in any::<u64>()) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let config = common::random_sim_config(&mut rng);
        let log = run_simulation(&config).unwrap();

        let mut detected = HashMap::new();
        let mut notified = HashMap::new();
        let mut labeled = HashMap::new();
        let mut labels_since = 0u64;
        let mut last_rate = config.false_alarm_rate_per_hr;
        for e in log.entries() {
            match e.kind {
                EntryKind::Detection { event_id, .. } => { detected.insert(event_id, e.t); }
                EntryKind::Notification { event_id } => { notified.insert(event_id, e.t); }
                EntryKind::Label { event_id, .. } => {
                    prop_assert!(labeled.insert(event_id, e.t).is_none(), "second label for {:?}", event_id);
                    labels_since += 1;
                }
                EntryKind::Retrain { labels, new_false_alarm_rate_per_hr, .. } => {
                    prop_assert_eq!(labels, labels_since);
                    prop_assert!(new_false_alarm_rate_per_hr <= last_rate);
                    last_rate = new_false_alarm_rate_per_hr;
                    labels_since = 0;
                }
                _ => {}
            }
        }
        for (id, t) in &labeled {
            prop_assert!(detected[id] <= notified[id] && notified[id] <= *t);
        }
        prop_assert!(labels_since < config.retrain_batch_size);
    }
}

#[derive(Debug, Clone)]
enum Op {
    Detect(bool),
    Notify(usize),
    Label(usize, u32, bool),
    Retrain,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        any::<bool>().prop_map(Op::Detect),
        (0usize..40).prop_map(Op::Notify),
        (0usize..40, 0u32..4, any::<bool>()).prop_map(|(e, o, v)| Op::Label(e, o, v)),
        Just(Op::Retrain),
    ]
}

proptest! {
    #[test]
    fn state_machine_labels_once(ops in prop::collection::vec(op(), 1..120)) {
        let mut state = SimState::new(Timestamp::ZERO, 4, 1.0, 10.0, 3, 0.5);
        let mut ids = Vec::new();
        let mut accepted = BTreeSet::new();
        let mut attempts = 0usize;
        for (step, op) in ops.into_iter().enumerate() {
            let t = Timestamp::from_millis(10_000 + step as u64 * 1000);
            match op {
                Op::Detect(truth) => {
                    let start = Timestamp::from_millis(t.as_millis() - 8000);
                    ids.push(state.record_detection(t, start, t, truth).unwrap());
                }
                Op::Notify(i) if !ids.is_empty() => {
                    let _ = state.notify(ids[i % ids.len()], t);
                }
                Op::Label(i, o, v) if !ids.is_empty() => {
                    let id: EventId = ids[i % ids.len()];
                    let op = OperatorId(o);
                    let value = if v { LabelValue::Confirm } else { LabelValue::Reject };
                    let queued = state.queue(op).any(|e| e == id);
                    match state.submit_label(id, op, value, t) {
                        Ok(LabelOutcome::Accepted) => {
                            prop_assert!(queued);
                            prop_assert!(accepted.insert(id));
                            attempts += 1;
                            for k in 0..4 {
                                prop_assert!(state.queue(OperatorId(k)).all(|e| e != id));
                            }
                        }
                        Ok(LabelOutcome::Rejected) => prop_assert!(accepted.contains(&id)),
                        Err(_) => prop_assert!(!queued),
                    }
                }
                Op::Retrain => {
                    let before = state.false_alarm_rate_per_hr();
                    let due = state.retrain_due();
                    let record = state.trigger_retraining(t).unwrap();
                    prop_assert_eq!(record.is_some(), due);
                    prop_assert!(state.false_alarm_rate_per_hr() <= before);
                }
                _ => {}
            }
        }
        prop_assert_eq!(state.labels().len(), attempts);
        prop_assert_eq!(state.actions().len(), attempts);
        let log = state.into_log();
        prop_assert_eq!(log.count_kind("label"), accepted.len());
    }
}

#[test]
fn two_event_example_greedy_is_optimal() {
    let gt = [(0, 9), (20, 29)];
    let pred = [(2, 11), (21, 28), (50, 55)];
    let r = match_events(&common::intervals(&gt), &common::intervals(&pred), 0.5).unwrap();
    assert_eq!(r.tp, common::max_matching_oracle(&gt, &pred, 0.5));
}
