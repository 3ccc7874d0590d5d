//! Deterministic discrete-event simulation of the alert/feedback loop.
//!
//! A detector emits clip alerts from two Poisson processes (true events and
//! false alarms). Each alert is notified after a delay and fanned out to
//! every operator's queue. Idle operators review the oldest queued alert and
//! label it after a log-normal (or otherwise configured) response delay; the
//! first label wins and the event leaves all queues. Every
//! `retrain_batch_size` labels the false-alarm rate is multiplied by
//! `retrain_fp_decay`.
//!
//! # Determinism
//!
//! All randomness comes from one `ChaCha8Rng` seeded with `config.seed`.
//! Pending work sits in a min-heap keyed by `(time_ms, insertion_seq)`.
//! Draws happen in this order:
//!
//! 1. At start: first true-event gap, then first false-alarm gap (each only
//!    if its rate is positive).
//! 2. On an arrival: clip length, notification delay, then the next gap of
//!    the same process.
//! 3. When an idle operator picks up an alert: its response delay.
//! 4. When a label is accepted: one uniform for label correctness.
//! 5. After a retrain: a fresh false-alarm gap at the new rate, replacing
//!    the pending one.
//!
//! Work scheduled past `duration_s` is dropped.

mod config;
mod log;
mod state;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

pub use self::config::{ClipRange, ConfigError, DelayDist, SimConfig, CLIP_MAX_S, CLIP_MIN_S};
pub use self::log::{EntryKind, EventId, EventLog, LabelValue, LogEntry, LogError, OperatorId, Timestamp};
pub use self::state::{ActionRecord, AlertRecord, FeedbackLabel, LabelOutcome, RetrainRecord, SimError, SimState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Source {
    TrueEvent,
    FalseAlarm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Job {
    Arrival { source: Source, generation: u64 },
    Detect { clip_start: Timestamp, clip_end: Timestamp, notify_delay_ms: u64, is_true: bool },
    Notify { event_id: EventId },
    LabelAttempt { operator_id: OperatorId, event_id: EventId },
}

struct Engine {
    config: SimConfig,
    rng: ChaCha8Rng,
    state: SimState,
    heap: BinaryHeap<Reverse<(Timestamp, u64, Job)>>,
    next_job_seq: u64,
    end: Timestamp,
    false_alarm_generation: u64,
    reviewing: Vec<Option<EventId>>,
}

fn secs_to_ms(secs: f64) -> u64 {
    Timestamp::from_secs_f64(secs).as_millis()
}

impl Engine {
    fn new(config: SimConfig) -> Self {
        let state = SimState::new(
            Timestamp::ZERO,
            config.num_operators,
            config.true_event_rate_per_hr,
            config.false_alarm_rate_per_hr,
            config.retrain_batch_size,
            config.retrain_fp_decay,
        );
        Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            end: Timestamp::from_secs_f64(config.duration_s),
            reviewing: vec![None; config.num_operators as usize],
            config,
            state,
            heap: BinaryHeap::new(),
            next_job_seq: 0,
            false_alarm_generation: 0,
        }
    }

    fn schedule(&mut self, at: Timestamp, job: Job) {
        if at > self.end {
            return;
        }
        let seq = self.next_job_seq;
        self.next_job_seq += 1;
        self.heap.push(Reverse((at, seq, job)));
    }

    fn rate_of(&self, source: Source) -> f64 {
        match source {
            Source::TrueEvent => self.config.true_event_rate_per_hr,
            Source::FalseAlarm => self.state.false_alarm_rate_per_hr(),
        }
    }

    fn schedule_arrival(&mut self, now: Timestamp, source: Source) {
        let rate_per_hr = self.rate_of(source);
        if rate_per_hr <= 0.0 {
            return;
        }
        let gap_s = Exp::new(rate_per_hr / 3600.0).expect("positive rate").sample(&mut self.rng);
        let generation = match source {
            Source::TrueEvent => 0,
            Source::FalseAlarm => self.false_alarm_generation,
        };
        self.schedule(now.saturating_add_millis(secs_to_ms(gap_s)), Job::Arrival { source, generation });
    }

    fn on_arrival(&mut self, now: Timestamp, source: Source, generation: u64) {
        if source == Source::FalseAlarm && generation != self.false_alarm_generation {
            return;
        }
        let ClipRange { min, max } = self.config.clip_len_s;
        let clip_ms = secs_to_ms(config::sample_uniform(&mut self.rng, min, max));
        let notify_delay_ms = secs_to_ms(self.config.notify_delay_s.sample(&mut self.rng));
        let clip_end = now.saturating_add_millis(clip_ms);
        self.schedule(
            clip_end,
            Job::Detect { clip_start: now, clip_end, notify_delay_ms, is_true: source == Source::TrueEvent },
        );
        self.schedule_arrival(now, source);
    }

    fn dispatch_idle(&mut self, now: Timestamp) {
        for op in 0..self.reviewing.len() {
            if self.reviewing[op].is_some() {
                continue;
            }
            let operator_id = OperatorId(op as u32);
            if let Some(event_id) = self.state.next_for(operator_id) {
                self.reviewing[op] = Some(event_id);
                let delay_ms = secs_to_ms(self.config.operator_response_delay_s.sample(&mut self.rng));
                self.schedule(now.saturating_add_millis(delay_ms), Job::LabelAttempt { operator_id, event_id });
            }
        }
    }

    fn on_label_attempt(&mut self, now: Timestamp, operator_id: OperatorId, event_id: EventId) {
        self.reviewing[operator_id.0 as usize] = None;
        let is_true = self.state.alert(event_id).expect("scheduled for a known alert").is_true_anomaly;
        let already_labeled = self.state.alert(event_id).is_some_and(|a| a.label.is_some());
        let value = if already_labeled {
            // Outcome is a rejection regardless of the verdict; no draw.
            LabelValue::Confirm
        } else {
            let correct = self.rng.random::<f64>() < self.config.operator_label_accuracy;
            match (is_true, correct) {
                (true, true) | (false, false) => LabelValue::Confirm,
                _ => LabelValue::Reject,
            }
        };
        let outcome = self
            .state
            .submit_label(event_id, operator_id, value, now)
            .expect("operator reviews an event from its own queue");
        if outcome == LabelOutcome::Accepted && self.state.trigger_retraining(now).expect("time is monotone").is_some()
        {
            self.false_alarm_generation += 1;
            self.schedule_arrival(now, Source::FalseAlarm);
        }
    }

    fn run(mut self) -> EventLog {
        self.schedule_arrival(Timestamp::ZERO, Source::TrueEvent);
        self.schedule_arrival(Timestamp::ZERO, Source::FalseAlarm);

        while let Some(Reverse((now, _, job))) = self.heap.pop() {
            match job {
                Job::Arrival { source, generation } => self.on_arrival(now, source, generation),
                Job::Detect { clip_start, clip_end, notify_delay_ms, is_true } => {
                    let event_id = self
                        .state
                        .record_detection(now, clip_start, clip_end, is_true)
                        .expect("clip length drawn within bounds");
                    self.schedule(now.saturating_add_millis(notify_delay_ms), Job::Notify { event_id });
                }
                Job::Notify { event_id } => {
                    self.state.notify(event_id, now).expect("notify follows detection");
                    self.dispatch_idle(now);
                }
                Job::LabelAttempt { operator_id, event_id } => {
                    self.on_label_attempt(now, operator_id, event_id);
                    self.dispatch_idle(now);
                }
            }
        }
        self.state.into_log()
    }
}

/// Runs one simulation. Equal configs (seed included) give equal logs.
pub fn run_simulation(config: &SimConfig) -> Result<EventLog, ConfigError> {
    config.validate()?;
    Ok(Engine::new(config.clone()).run())
}
