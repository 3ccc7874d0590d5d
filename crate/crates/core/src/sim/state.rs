//! Alert/feedback state machine shared by the scheduler and direct callers.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::log::{EntryKind, EventId, EventLog, LabelValue, LogWriter, OperatorId, Timestamp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{0} does not exist")]
    UnknownEvent(EventId),
    #[error("{0} has not been notified")]
    NotNotified(EventId),
    #[error("{event_id} is not in the queue of {operator_id}")]
    NotInQueue { event_id: EventId, operator_id: OperatorId },
    #[error("{0} does not exist")]
    UnknownOperator(OperatorId),
    #[error("time {t} precedes the last logged time {last}")]
    TimeReversed { t: Timestamp, last: Timestamp },
    #[error("clip of {0} ms is outside the allowed clip length")]
    ClipLength(u64),
    #[error("{0} was already notified")]
    AlreadyNotified(EventId),
}

/// One dispatched clip and its lifecycle timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct AlertRecord {
    pub event_id: EventId,
    pub clip_start: Timestamp,
    pub clip_end: Timestamp,
    pub detected_at: Timestamp,
    pub notified_at: Option<Timestamp>,
    pub is_true_anomaly: bool,
    pub label: Option<LabelValue>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackLabel {
    pub event_id: EventId,
    pub operator_id: OperatorId,
    pub value: LabelValue,
    pub labeled_at: Timestamp,
}

/// The operator's recorded action; coincides with labeling in this model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionRecord {
    pub event_id: EventId,
    pub operator_id: OperatorId,
    pub acted_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelOutcome {
    Accepted,
    /// The event already had a label; only a rejection entry was logged.
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrainRecord {
    pub labels: u64,
    pub old_rate_per_hr: f64,
    pub new_rate_per_hr: f64,
}

/// Alerts, operator queues, labels and the retraining accumulator.
///
/// Every mutation appends to the run's log. Times passed in must not go
/// backwards relative to the last logged entry.
#[derive(Debug)]
pub struct SimState {
    clip_bounds_ms: (u64, u64),
    retrain_batch_size: u64,
    retrain_fp_decay: f64,
    false_alarm_rate_per_hr: f64,
    alerts: BTreeMap<EventId, AlertRecord>,
    // FIFO by notification time, ties by event id.
    queues: Vec<BTreeSet<(Timestamp, EventId)>>,
    labels: Vec<FeedbackLabel>,
    actions: Vec<ActionRecord>,
    labels_since_retrain: u64,
    next_event_id: u64,
    log: LogWriter,
}

impl SimState {
    /// Starts a deployment at `t`, logging the deployment entry.
    pub fn new(
        t: Timestamp,
        num_operators: u32,
        true_event_rate_per_hr: f64,
        false_alarm_rate_per_hr: f64,
        retrain_batch_size: u64,
        retrain_fp_decay: f64,
    ) -> Self {
        let mut log = LogWriter::default();
        log.push(t, EntryKind::Deployment { num_operators, true_event_rate_per_hr, false_alarm_rate_per_hr });
        Self {
            clip_bounds_ms: ((super::config::CLIP_MIN_S * 1000.0) as u64, (super::config::CLIP_MAX_S * 1000.0) as u64),
            retrain_batch_size: retrain_batch_size.max(1),
            retrain_fp_decay,
            false_alarm_rate_per_hr,
            alerts: BTreeMap::new(),
            queues: vec![BTreeSet::new(); num_operators as usize],
            labels: Vec::new(),
            actions: Vec::new(),
            labels_since_retrain: 0,
            next_event_id: 0,
            log,
        }
    }

    fn check_time(&self, t: Timestamp) -> Result<(), SimError> {
        let last = self.log.last_time();
        if t < last {
            return Err(SimError::TimeReversed { t, last });
        }
        Ok(())
    }

    fn check_operator(&self, operator_id: OperatorId) -> Result<(), SimError> {
        if (operator_id.0 as usize) < self.queues.len() {
            Ok(())
        } else {
            Err(SimError::UnknownOperator(operator_id))
        }
    }

    pub fn num_operators(&self) -> u32 {
        self.queues.len() as u32
    }

    pub fn false_alarm_rate_per_hr(&self) -> f64 {
        self.false_alarm_rate_per_hr
    }

    pub fn alert(&self, event_id: EventId) -> Option<&AlertRecord> {
        self.alerts.get(&event_id)
    }

    pub fn labels(&self) -> &[FeedbackLabel] {
        &self.labels
    }

    pub fn actions(&self) -> &[ActionRecord] {
        &self.actions
    }

    pub fn queue(&self, operator_id: OperatorId) -> impl Iterator<Item = EventId> + '_ {
        self.queues.get(operator_id.0 as usize).into_iter().flat_map(|q| q.iter().map(|&(_, id)| id))
    }

    /// Oldest event still in the operator's queue.
    pub fn next_for(&self, operator_id: OperatorId) -> Option<EventId> {
        self.queue(operator_id).next()
    }

    /// Registers a completed clip at `t` (the detection time) and returns its id.
    pub fn record_detection(
        &mut self,
        t: Timestamp,
        clip_start: Timestamp,
        clip_end: Timestamp,
        is_true_anomaly: bool,
    ) -> Result<EventId, SimError> {
        self.check_time(t)?;
        let len = clip_end.as_millis().saturating_sub(clip_start.as_millis());
        let (lo, hi) = self.clip_bounds_ms;
        if clip_end < clip_start || !(lo..=hi).contains(&len) {
            return Err(SimError::ClipLength(len));
        }
        let event_id = EventId(self.next_event_id);
        self.next_event_id += 1;
        self.alerts.insert(
            event_id,
            AlertRecord {
                event_id,
                clip_start,
                clip_end,
                detected_at: t,
                notified_at: None,
                is_true_anomaly,
                label: None,
            },
        );
        self.log.push(t, EntryKind::Detection { event_id, clip_start, clip_end, is_true_anomaly });
        Ok(event_id)
    }

    /// Sends the notification and fans the event out to every operator queue.
    pub fn notify(&mut self, event_id: EventId, t: Timestamp) -> Result<(), SimError> {
        self.check_time(t)?;
        let alert = self.alerts.get_mut(&event_id).ok_or(SimError::UnknownEvent(event_id))?;
        if alert.notified_at.is_some() {
            return Err(SimError::AlreadyNotified(event_id));
        }
        if t < alert.detected_at {
            return Err(SimError::TimeReversed { t, last: alert.detected_at });
        }
        alert.notified_at = Some(t);
        self.log.push(t, EntryKind::Notification { event_id });
        for (op, queue) in self.queues.iter_mut().enumerate() {
            queue.insert((t, event_id));
            self.log.push(t, EntryKind::QueueInsert { event_id, operator_id: OperatorId(op as u32) });
        }
        Ok(())
    }

    /// Records an operator's verdict.
    ///
    /// The first label for an event wins: it is stored once, paired with an
    /// action record, and the event leaves every queue still holding it.
    /// Later attempts are logged as rejections and change nothing else.
    pub fn submit_label(
        &mut self,
        event_id: EventId,
        operator_id: OperatorId,
        value: LabelValue,
        t: Timestamp,
    ) -> Result<LabelOutcome, SimError> {
        self.check_time(t)?;
        self.check_operator(operator_id)?;
        let alert = self.alerts.get(&event_id).ok_or(SimError::UnknownEvent(event_id))?;
        let notified_at = alert.notified_at.ok_or(SimError::NotNotified(event_id))?;
        if alert.label.is_some() {
            self.log.push(t, EntryKind::LabelRejected { event_id, operator_id });
            return Ok(LabelOutcome::Rejected);
        }
        if !self.queues[operator_id.0 as usize].contains(&(notified_at, event_id)) {
            return Err(SimError::NotInQueue { event_id, operator_id });
        }

        if let Some(alert) = self.alerts.get_mut(&event_id) {
            alert.label = Some(value);
        }
        self.labels.push(FeedbackLabel { event_id, operator_id, value, labeled_at: t });
        self.actions.push(ActionRecord { event_id, operator_id, acted_at: t });
        self.log.push(t, EntryKind::Label { event_id, operator_id, value });
        self.log.push(t, EntryKind::Action { event_id, operator_id });
        for (op, queue) in self.queues.iter_mut().enumerate() {
            if queue.remove(&(notified_at, event_id)) {
                self.log.push(t, EntryKind::QueueRemove { event_id, operator_id: OperatorId(op as u32) });
            }
        }
        self.labels_since_retrain += 1;
        Ok(LabelOutcome::Accepted)
    }

    pub fn retrain_due(&self) -> bool {
        self.labels_since_retrain >= self.retrain_batch_size
    }

    /// Applies the false-alarm decay once enough labels have accumulated.
    /// Returns `None`, logging nothing, when the batch is not yet full.
    pub fn trigger_retraining(&mut self, t: Timestamp) -> Result<Option<RetrainRecord>, SimError> {
        self.check_time(t)?;
        if !self.retrain_due() {
            return Ok(None);
        }
        let record = RetrainRecord {
            labels: self.labels_since_retrain,
            old_rate_per_hr: self.false_alarm_rate_per_hr,
            new_rate_per_hr: self.false_alarm_rate_per_hr * self.retrain_fp_decay,
        };
        self.false_alarm_rate_per_hr = record.new_rate_per_hr;
        self.labels_since_retrain = 0;
        self.log.push(
            t,
            EntryKind::Retrain {
                labels: record.labels,
                old_false_alarm_rate_per_hr: record.old_rate_per_hr,
                new_false_alarm_rate_per_hr: record.new_rate_per_hr,
            },
        );
        Ok(Some(record))
    }

    pub fn into_log(self) -> EventLog {
        self.log.finish()
    }

    pub fn log_len(&self) -> usize {
        self.log.len()
    }
}
