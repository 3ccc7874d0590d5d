//! Toolkit for human-in-the-loop anomaly alert pipelines.
//!
//! The crate covers four areas:
//!
//! - [`frames`]: smoothing of per-frame binary anomaly flags and merging
//!   them into event intervals.
//! - [`matching`]: IoU-based one-to-one matching of predicted events against
//!   ground truth, with detection counts and precision/recall.
//! - [`sim`]: a deterministic discrete-event simulation of the
//!   alert → notify → label → retrain loop, producing an append-only log.
//! - [`metrics`]: accuracy, latency, adaptation time and trust metrics
//!   computed from logs, match reports and survey responses.
//!
//! File formats and report rendering live in [`io`].

pub mod frames;
pub mod io;
pub mod matching;
pub mod metrics;
pub mod sim;

pub use frames::{
    extract_events, postprocess, postprocess_with, smooth, smooth_with, EventInterval, FrameError, FrameSeries,
    SmoothingMode,
};

pub use matching::{iou, match_events, precision_recall, EventMatch, MatchReport, DEFAULT_IOU_THRESHOLD};

pub use io::{ParseError, ReportFormat};
pub use metrics::{LatencyStats, LogMetrics, MetricsBundle, MetricsError, SurveyResponseSet, TrustReport};

pub use sim::{
    run_simulation, ConfigError, DelayDist, EntryKind, EventId, EventLog, LogEntry, OperatorId, SimConfig, SimState,
    Timestamp,
};
