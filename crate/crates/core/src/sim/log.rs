//! Append-only simulation log.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Simulated time in whole milliseconds since simulation start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Timestamp(u64);

impl Timestamp {
    pub const ZERO: Timestamp = Timestamp(0);

    pub fn from_millis(ms: u64) -> Self {
        Timestamp(ms)
    }

    /// Rounds to the nearest millisecond; negative and NaN inputs clamp to zero.
    pub fn from_secs_f64(secs: f64) -> Self {
        if secs.is_nan() || secs <= 0.0 {
            return Timestamp(0);
        }
        Timestamp((secs * 1000.0).round() as u64)
    }

    pub fn as_millis(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn saturating_add_millis(self, ms: u64) -> Self {
        Timestamp(self.0.saturating_add(ms))
    }

    /// Seconds from `earlier` to `self`, negative if `earlier` is later.
    pub fn secs_since(self, earlier: Timestamp) -> f64 {
        (self.0 as i128 - earlier.0 as i128) as f64 / 1000.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorId(pub u32);

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {}", self.0)
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "operator {}", self.0)
    }
}

/// Binary operator verdict on an alert clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelValue {
    /// +1, the clip shows a real anomaly.
    Confirm,
    /// −1, false alarm.
    Reject,
}

impl LabelValue {
    pub fn as_i8(self) -> i8 {
        match self {
            LabelValue::Confirm => 1,
            LabelValue::Reject => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            1 => Some(LabelValue::Confirm),
            -1 => Some(LabelValue::Reject),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EntryKind {
    Deployment {
        num_operators: u32,
        true_event_rate_per_hr: f64,
        false_alarm_rate_per_hr: f64,
    },
    /// Logged when the clip is complete; the entry time is `detected_at`.
    Detection {
        event_id: EventId,
        clip_start: Timestamp,
        clip_end: Timestamp,
        is_true_anomaly: bool,
    },
    Notification {
        event_id: EventId,
    },
    QueueInsert {
        event_id: EventId,
        operator_id: OperatorId,
    },
    QueueRemove {
        event_id: EventId,
        operator_id: OperatorId,
    },
    Label {
        event_id: EventId,
        operator_id: OperatorId,
        value: LabelValue,
    },
    /// A label attempt on an event that already carries a label.
    LabelRejected {
        event_id: EventId,
        operator_id: OperatorId,
    },
    Action {
        event_id: EventId,
        operator_id: OperatorId,
    },
    Retrain {
        labels: u64,
        old_false_alarm_rate_per_hr: f64,
        new_false_alarm_rate_per_hr: f64,
    },
}

impl EntryKind {
    pub fn name(&self) -> &'static str {
        match self {
            EntryKind::Deployment { .. } => "deployment",
            EntryKind::Detection { .. } => "detection",
            EntryKind::Notification { .. } => "notification",
            EntryKind::QueueInsert { .. } => "queue_insert",
            EntryKind::QueueRemove { .. } => "queue_remove",
            EntryKind::Label { .. } => "label",
            EntryKind::LabelRejected { .. } => "label_rejected",
            EntryKind::Action { .. } => "action",
            EntryKind::Retrain { .. } => "retrain",
        }
    }

    pub fn event_id(&self) -> Option<EventId> {
        match *self {
            EntryKind::Detection { event_id, .. }
            | EntryKind::Notification { event_id }
            | EntryKind::QueueInsert { event_id, .. }
            | EntryKind::QueueRemove { event_id, .. }
            | EntryKind::Label { event_id, .. }
            | EntryKind::LabelRejected { event_id, .. }
            | EntryKind::Action { event_id, .. } => Some(event_id),
            EntryKind::Deployment { .. } | EntryKind::Retrain { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub seq: u64,
    pub t: Timestamp,
    pub kind: EntryKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogError {
    #[error("entry {index}: seq {seq} does not follow {prev}")]
    SeqNotIncreasing { index: usize, prev: u64, seq: u64 },
    #[error("entry {index}: time {t} is before {prev}")]
    TimeDecreasing { index: usize, prev: Timestamp, t: Timestamp },
    #[error("entry {index}: {kind} for {event_id} before its {needs}")]
    MissingPrecursor { index: usize, kind: &'static str, event_id: EventId, needs: &'static str },
    #[error("entry {index}: duplicate {kind} for {event_id}")]
    Duplicate { index: usize, kind: &'static str, event_id: EventId },
}

impl LogError {
    /// Zero-based position of the offending entry.
    pub fn index(&self) -> usize {
        match *self {
            LogError::SeqNotIncreasing { index, .. }
            | LogError::TimeDecreasing { index, .. }
            | LogError::MissingPrecursor { index, .. }
            | LogError::Duplicate { index, .. } => index,
        }
    }
}

/// Ordered log entries with strictly increasing `seq` and non-decreasing time.
///
/// Every notification follows its detection, and queue, label, rejection
/// and action entries follow the event's notification. Each event is
/// detected, notified and labeled at most once.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    entries: Vec<LogEntry>,
}

impl EventLog {
    pub fn from_entries(entries: Vec<LogEntry>) -> Result<Self, LogError> {
        let mut detected = HashSet::new();
        let mut notified = HashSet::new();
        let mut labeled = HashSet::new();
        for (index, entry) in entries.iter().enumerate() {
            if index > 0 {
                let prev = &entries[index - 1];
                if entry.seq <= prev.seq {
                    return Err(LogError::SeqNotIncreasing { index, prev: prev.seq, seq: entry.seq });
                }
                if entry.t < prev.t {
                    return Err(LogError::TimeDecreasing { index, prev: prev.t, t: entry.t });
                }
            }
            let kind = entry.kind.name();
            let Some(event_id) = entry.kind.event_id() else { continue };
            let dup = |set: &mut HashSet<EventId>| {
                if set.insert(event_id) {
                    Ok(())
                } else {
                    Err(LogError::Duplicate { index, kind, event_id })
                }
            };
            let require = |set: &HashSet<EventId>, needs| {
                if set.contains(&event_id) {
                    Ok(())
                } else {
                    Err(LogError::MissingPrecursor { index, kind, event_id, needs })
                }
            };
            match entry.kind {
                EntryKind::Detection { .. } => dup(&mut detected)?,
                EntryKind::Notification { .. } => {
                    require(&detected, "detection")?;
                    dup(&mut notified)?;
                }
                EntryKind::Label { .. } => {
                    require(&notified, "notification")?;
                    dup(&mut labeled)?;
                }
                _ => require(&notified, "notification")?,
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Time of the deployment entry, falling back to the first entry.
    pub fn deployment_time(&self) -> Option<Timestamp> {
        self.entries
            .iter()
            .find(|e| matches!(e.kind, EntryKind::Deployment { .. }))
            .or_else(|| self.entries.first())
            .map(|e| e.t)
    }

    pub fn last_time(&self) -> Option<Timestamp> {
        self.entries.last().map(|e| e.t)
    }

    pub fn count_kind(&self, name: &str) -> usize {
        self.entries.iter().filter(|e| e.kind.name() == name).count()
    }

    /// False-alarm rate after each retrain, in log order.
    pub fn retrain_rates(&self) -> Vec<f64> {
        self.entries
            .iter()
            .filter_map(|e| match e.kind {
                EntryKind::Retrain { new_false_alarm_rate_per_hr, .. } => Some(new_false_alarm_rate_per_hr),
                _ => None,
            })
            .collect()
    }
}

/// Incremental builder that stamps sequence numbers.
#[derive(Debug, Default)]
pub(crate) struct LogWriter {
    entries: Vec<LogEntry>,
}

impl LogWriter {
    pub(crate) fn push(&mut self, t: Timestamp, kind: EntryKind) {
        let seq = self.entries.len() as u64;
        self.entries.push(LogEntry { seq, t, kind });
    }

    pub(crate) fn len(&self) -> usize {
        self.entries.len()
    }

    pub(crate) fn last_time(&self) -> Timestamp {
        self.entries.last().map_or(Timestamp::ZERO, |e| e.t)
    }

    pub(crate) fn finish(self) -> EventLog {
        EventLog { entries: self.entries }
    }
}
