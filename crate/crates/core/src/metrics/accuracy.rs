use std::collections::HashMap;

use crate::matching::MatchReport;
use crate::sim::{EntryKind, EventLog, LabelValue};

fn label_counts<'a>(entries: impl Iterator<Item = &'a EntryKind>) -> (usize, usize) {
    entries.fold((0, 0), |(pos, neg), kind| match kind {
        EntryKind::Label { value: LabelValue::Confirm, .. } => (pos + 1, neg),
        EntryKind::Label { value: LabelValue::Reject, .. } => (pos, neg + 1),
        _ => (pos, neg),
    })
}

fn share(part: usize, whole: usize) -> Option<f64> {
    (whole > 0).then(|| part as f64 / whole as f64)
}

/// Share of operator labels that reject the alert (−1).
pub fn feedback_fpr(log: &EventLog) -> Option<f64> {
    let (pos, neg) = label_counts(log.entries().iter().map(|e| &e.kind));
    share(neg, pos + neg)
}

/// Share of operator labels that confirm the alert (+1).
pub fn positive_label_share(log: &EventLog) -> Option<f64> {
    let (pos, neg) = label_counts(log.entries().iter().map(|e| &e.kind));
    share(pos, pos + neg)
}

/// Share of notified alerts whose hidden ground truth is a false alarm.
pub fn oracle_fpr(log: &EventLog) -> Option<f64> {
    let mut truth = HashMap::new();
    let (mut notified, mut false_alarms) = (0, 0);
    for entry in log.entries() {
        match entry.kind {
            EntryKind::Detection { event_id, is_true_anomaly, .. } => {
                truth.insert(event_id, is_true_anomaly);
            }
            EntryKind::Notification { event_id } => {
                notified += 1;
                if truth.get(&event_id) == Some(&false) {
                    false_alarms += 1;
                }
            }
            _ => {}
        }
    }
    share(false_alarms, notified)
}

/// [`feedback_fpr`] for each stretch of the log between retrain entries.
pub fn feedback_fpr_by_epoch(log: &EventLog) -> Vec<Option<f64>> {
    let mut epochs = Vec::new();
    let (mut pos, mut neg) = (0usize, 0usize);
    for entry in log.entries() {
        match entry.kind {
            EntryKind::Retrain { .. } => {
                epochs.push(share(neg, pos + neg));
                (pos, neg) = (0, 0);
            }
            ref kind => {
                let (p, n) = label_counts(std::iter::once(kind));
                pos += p;
                neg += n;
            }
        }
    }
    epochs.push(share(neg, pos + neg));
    epochs
}

/// `fn / gt_count`, absent without ground truth.
pub fn detection_fnr(report: &MatchReport) -> Option<f64> {
    share(report.fn_, report.gt_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{EventId, LogEntry, OperatorId, Timestamp};

    fn log_with_labels(values: &[LabelValue]) -> EventLog {
        let mut entries = Vec::new();
        let mut seq = 0;
        let mut push = |t: u64, kind| {
            entries.push(LogEntry { seq, t: Timestamp::from_millis(t), kind });
            seq += 1;
        };
        for (i, &value) in values.iter().enumerate() {
            let event_id = EventId(i as u64);
            let t = 10_000 * (i as u64 + 1);
            push(
                t,
                EntryKind::Detection {
                    event_id,
                    clip_start: Timestamp::from_millis(t - 5000),
                    clip_end: Timestamp::from_millis(t),
                    is_true_anomaly: i % 2 == 0,
                },
            );
            push(t, EntryKind::Notification { event_id });
            push(t + 1, EntryKind::Label { event_id, operator_id: OperatorId(0), value });
        }
        EventLog::from_entries(entries).unwrap()
    }

    #[test]
    fn three_rejections_in_ten() {
        let mut values = vec![LabelValue::Confirm; 7];
        values.extend([LabelValue::Reject; 3]);
        let log = log_with_labels(&values);
        assert_eq!(feedback_fpr(&log), Some(0.3));
        assert_eq!(positive_label_share(&log), Some(0.7));
        assert_eq!(oracle_fpr(&log), Some(0.5));
    }

    #[test]
    fn all_confirmed_and_empty() {
        assert_eq!(feedback_fpr(&log_with_labels(&[LabelValue::Confirm; 4])), Some(0.0));
        assert_eq!(feedback_fpr(&log_with_labels(&[])), None);
        assert_eq!(oracle_fpr(&log_with_labels(&[])), None);
    }

    #[test]
    fn fnr_from_report() {
        let r = MatchReport::from_counts(40, 41, 30).unwrap();
        assert_eq!(detection_fnr(&r), Some(0.25));
        assert_eq!(detection_fnr(&MatchReport::from_counts(5, 5, 5).unwrap()), Some(0.0));
        assert_eq!(detection_fnr(&MatchReport::from_counts(0, 3, 0).unwrap()), None);
    }

    #[test]
    fn epochs_without_retrain() {
        let log = log_with_labels(&[LabelValue::Reject, LabelValue::Confirm]);
        assert_eq!(feedback_fpr_by_epoch(&log), vec![Some(0.5)]);
    }
}
