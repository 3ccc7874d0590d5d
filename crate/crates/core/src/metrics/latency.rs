use std::collections::HashMap;

use serde::Serialize;

use crate::sim::{EntryKind, EventLog, Timestamp};

/// Summary of a latency sample in seconds. All values are `None` when `n == 0`.
///
/// `p90_s` and `p99_s` are nearest-rank percentiles (the `ceil(p·n)`-th
/// smallest value). `median_s` is the midpoint median, averaging the two
/// middle values for even `n`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LatencyStats {
    pub n: usize,
    pub mean_s: Option<f64>,
    pub median_s: Option<f64>,
    pub p90_s: Option<f64>,
    pub p99_s: Option<f64>,
    pub max_s: Option<f64>,
}

/// `ceil(percent·n/100)`-th order statistic of an ascending slice.
pub fn nearest_rank(sorted: &[f64], percent: u32) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = (percent as usize * n).div_ceil(100).clamp(1, n);
    Some(sorted[rank - 1])
}

impl LatencyStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self::default();
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
        Self {
            n,
            mean_s: Some(sorted.iter().sum::<f64>() / n as f64),
            median_s: Some(median),
            p90_s: nearest_rank(&sorted, 90),
            p99_s: nearest_rank(&sorted, 99),
            max_s: sorted.last().copied(),
        }
    }
}

/// Incident onset (clip start) to notification, per notified alert.
pub fn technical_latency_samples(log: &EventLog) -> Vec<f64> {
    let mut onset: HashMap<_, Timestamp> = HashMap::new();
    let mut samples = Vec::new();
    for entry in log.entries() {
        match entry.kind {
            EntryKind::Detection { event_id, clip_start, .. } => {
                onset.insert(event_id, clip_start);
            }
            EntryKind::Notification { event_id } => {
                if let Some(start) = onset.get(&event_id) {
                    samples.push(entry.t.secs_since(*start).max(0.0));
                }
            }
            _ => {}
        }
    }
    samples
}

/// Notification to recorded action, per acted-on alert, paired with the action time.
pub fn organizational_latency_samples(log: &EventLog) -> Vec<(Timestamp, f64)> {
    let mut notified: HashMap<_, Timestamp> = HashMap::new();
    let mut samples = Vec::new();
    for entry in log.entries() {
        match entry.kind {
            EntryKind::Notification { event_id } => {
                notified.insert(event_id, entry.t);
            }
            EntryKind::Action { event_id, .. } => {
                if let Some(at) = notified.get(&event_id) {
                    samples.push((entry.t, entry.t.secs_since(*at)));
                }
            }
            _ => {}
        }
    }
    samples
}

pub fn technical_latency(log: &EventLog) -> LatencyStats {
    LatencyStats::from_samples(&technical_latency_samples(log))
}

pub fn organizational_latency(log: &EventLog) -> LatencyStats {
    let samples: Vec<f64> = organizational_latency_samples(log).into_iter().map(|(_, d)| d).collect();
    LatencyStats::from_samples(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{EventId, LabelValue, LogEntry, OperatorId};

    struct Builder {
        entries: Vec<LogEntry>,
    }

    impl Builder {
        fn push(&mut self, ms: u64, kind: EntryKind) {
            let seq = self.entries.len() as u64;
            self.entries.push(LogEntry { seq, t: Timestamp::from_millis(ms), kind });
        }

        fn event(&mut self, id: u64, clip_start: u64, notified: u64, acted: Option<u64>) {
            let event_id = EventId(id);
            self.push(
                clip_start + 5000,
                EntryKind::Detection {
                    event_id,
                    clip_start: Timestamp::from_millis(clip_start),
                    clip_end: Timestamp::from_millis(clip_start + 5000),
                    is_true_anomaly: true,
                },
            );
            self.push(notified, EntryKind::Notification { event_id });
            if let Some(at) = acted {
                let operator_id = OperatorId(0);
                self.push(at, EntryKind::Label { event_id, operator_id, value: LabelValue::Confirm });
                self.push(at, EntryKind::Action { event_id, operator_id });
            }
        }

        fn build(self) -> EventLog {
            EventLog::from_entries(self.entries).unwrap()
        }
    }

    #[test]
    fn single_technical_sample() {
        let mut b = Builder { entries: vec![] };
        b.event(0, 100_000, 107_000, None);
        let stats = technical_latency(&b.build());
        assert_eq!(stats.n, 1);
        assert_eq!(stats.mean_s, Some(7.0));
        assert_eq!(stats.max_s, Some(7.0));
    }

    #[test]
    fn two_sample_mean_and_median() {
        let stats = LatencyStats::from_samples(&[4.0, 10.0]);
        assert_eq!((stats.mean_s, stats.median_s), (Some(7.0), Some(7.0)));
        assert_eq!((stats.p90_s, stats.p99_s), (Some(10.0), Some(10.0)));
    }

    #[test]
    fn organizational_deltas() {
        let mut b = Builder { entries: vec![] };
        b.event(0, 0, 100_000, Some(160_000));
        b.event(1, 200_000, 300_000, Some(330_000));
        b.event(2, 400_000, 500_000, Some(590_000));
        b.event(3, 600_000, 700_000, None);
        let stats = organizational_latency(&b.build());
        assert_eq!(stats.n, 3);
        assert_eq!(stats.median_s, Some(60.0));
        assert_eq!(stats.mean_s, Some(60.0));
    }

    #[test]
    fn empty_log_stats_absent() {
        let stats = technical_latency(&EventLog::default());
        assert_eq!(stats, LatencyStats::default());
        assert_eq!(stats.median_s, None);
    }

    #[test]
    fn nearest_rank_edges() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(nearest_rank(&v, 90), Some(9.0));
        assert_eq!(nearest_rank(&v, 99), Some(10.0));
        assert_eq!(nearest_rank(&v, 0), Some(1.0));
        assert_eq!(nearest_rank(&[], 50), None);
    }
}
