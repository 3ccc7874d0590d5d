//! UX metrics: accuracy, latency, adaptation time and trust.

mod accuracy;
mod adaptation;
mod latency;
mod trust;

use thiserror::Error;

use crate::matching::MatchReport;
use crate::sim::EventLog;

pub use accuracy::{detection_fnr, feedback_fpr, feedback_fpr_by_epoch, oracle_fpr, positive_label_share};
pub use adaptation::{adaptation_time, AdaptationParams};
pub use latency::{nearest_rank, organizational_latency, technical_latency, LatencyStats};
pub use trust::{cronbach_alpha, trust_score, SurveyResponseSet, TrustReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("survey needs at least {need} {what}, got {got}")]
    TooSmall { what: &'static str, need: usize, got: usize },
    #[error("no variance in total scores")]
    NoVariance,
    #[error("row {row}, column {column}: score {value} outside [{min}, {max}]")]
    ScoreOutOfRange { row: usize, column: usize, value: i64, min: i64, max: i64 },
    #[error("row {row} has {got} scores, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("reverse-coded item index {0} does not exist")]
    UnknownReverseItem(usize),
    #[error("scale minimum {min} is not below maximum {max}")]
    BadScale { min: i64, max: i64 },
}

/// Metrics derived from one event log.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMetrics {
    pub alerts: usize,
    pub labels: usize,
    pub retrains: usize,
    pub feedback_fpr: Option<f64>,
    pub oracle_fpr: Option<f64>,
    pub technical_latency: LatencyStats,
    pub organizational_latency: LatencyStats,
    pub adaptation: AdaptationParams,
    pub adaptation_time_s: Option<f64>,
}

impl LogMetrics {
    pub fn compute(log: &EventLog, adaptation: AdaptationParams) -> Result<Self, MetricsError> {
        Ok(Self {
            alerts: log.count_kind("notification"),
            labels: log.count_kind("label"),
            retrains: log.count_kind("retrain"),
            feedback_fpr: feedback_fpr(log),
            oracle_fpr: oracle_fpr(log),
            technical_latency: technical_latency(log),
            organizational_latency: organizational_latency(log),
            adaptation_time_s: adaptation_time(log, adaptation)?,
            adaptation,
        })
    }
}

/// Everything a report can show. Sections left `None` are not rendered.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsBundle {
    pub detection: Option<MatchReport>,
    pub log: Option<LogMetrics>,
    pub trust: Option<TrustReport>,
}
