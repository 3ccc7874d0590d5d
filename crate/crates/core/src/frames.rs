//! Frame-level post-processing: temporal smoothing and event extraction.
//!
//! Frames are grouped row-major into triples, so frame `f` lives in row
//! `f / 3`. Every row is then voted on by the 3×3 neighbourhood made of the
//! previous, current and next rows. Rows outside the series, and the unused
//! cells of a short final row, count as zeros. A row whose neighbourhood
//! holds at least [`MAJORITY`] anomalous frames becomes all ones.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Frames per smoothing row.
pub const ROW_WIDTH: usize = 3;

/// Anomalous cells needed in a 9-cell window (strictly more than half).
pub const MAJORITY: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("frame {index}: flag must be 0 or 1, got {value}")]
    InvalidFlag { index: usize, value: u8 },
    #[error("frame rate must be finite and positive, got {0}")]
    InvalidFrameRate(f64),
    #[error("interval start {start} is after end {end}")]
    InvertedInterval { start: u64, end: u64 },
    #[error("unknown smoothing mode {0:?} (expected replace or set_only)")]
    UnknownMode(String),
}

/// What happens to a row whose window does not reach the majority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingMode {
    /// Failing rows are cleared to zeros.
    #[default]
    Replace,
    /// Failing rows keep their original frames.
    SetOnly,
}

impl SmoothingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SmoothingMode::Replace => "replace",
            SmoothingMode::SetOnly => "set_only",
        }
    }
}

impl fmt::Display for SmoothingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SmoothingMode {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "replace" => Ok(SmoothingMode::Replace),
            "set_only" => Ok(SmoothingMode::SetOnly),
            other => Err(FrameError::UnknownMode(other.to_string())),
        }
    }
}

/// Per-frame binary anomaly flags, optionally tagged with a frame rate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameSeries {
    values: Vec<bool>,
    frame_rate: Option<f64>,
}

impl FrameSeries {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values, frame_rate: None }
    }

    /// Builds a series from 0/1 bytes, rejecting anything else.
    pub fn from_flags(flags: &[u8]) -> Result<Self, FrameError> {
        let values = flags
            .iter()
            .enumerate()
            .map(|(index, &value)| match value {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(FrameError::InvalidFlag { index, value }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(values))
    }

    pub fn with_frame_rate(mut self, fps: f64) -> Result<Self, FrameError> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(FrameError::InvalidFrameRate(fps));
        }
        self.frame_rate = Some(fps);
        Ok(self)
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn to_flags(&self) -> Vec<u8> {
        self.values.iter().map(|&v| u8::from(v)).collect()
    }

    pub fn frame_rate(&self) -> Option<f64> {
        self.frame_rate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of smoothing rows, `ceil(len / 3)`.
    pub fn row_count(&self) -> usize {
        self.values.len().div_ceil(ROW_WIDTH)
    }

    /// Rebuilds a series of `len` frames with the given intervals set.
    /// Interval frames past `len` are ignored.
    pub fn from_intervals(intervals: &[EventInterval], len: usize) -> Self {
        let mut values = vec![false; len];
        for iv in intervals {
            let start = iv.start() as usize;
            let end = (iv.end() as usize).min(len.saturating_sub(1));
            if start < len {
                values[start..=end].iter_mut().for_each(|v| *v = true);
            }
        }
        Self::new(values)
    }
}

/// Inclusive `[start, end]` frame range of one anomalous event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventInterval {
    start: u64,
    end: u64,
}

impl EventInterval {
    pub fn new(start: u64, end: u64) -> Result<Self, FrameError> {
        if start > end {
            return Err(FrameError::InvertedInterval { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn end(&self) -> u64 {
        self.end
    }

    /// Frames covered, endpoints included.
    pub fn len(&self) -> u64 {
        self.end - self.start + 1
    }

    // Never empty; kept for clippy's len/is_empty pairing.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn overlaps(&self, other: &EventInterval) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl fmt::Display for EventInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.end)
    }
}

/// Smooths with the default [`SmoothingMode::Replace`].
pub fn smooth(series: &FrameSeries) -> FrameSeries {
    smooth_with(series, SmoothingMode::Replace)
}

/// Majority-vote smoothing over 3×3 row windows.
///
/// Every row is decided from the original input, so one call is a single
/// pass with no cascading between neighbouring rows.
pub fn smooth_with(series: &FrameSeries, mode: SmoothingMode) -> FrameSeries {
    let input = series.values();
    let row_hits: Vec<usize> = input.chunks(ROW_WIDTH).map(|row| row.iter().filter(|&&v| v).count()).collect();

    let mut out = input.to_vec();
    for (row, chunk) in out.chunks_mut(ROW_WIDTH).enumerate() {
        let above = row.checked_sub(1).map_or(0, |r| row_hits[r]);
        let below = row_hits.get(row + 1).copied().unwrap_or(0);
        let window = above + row_hits[row] + below;
        if window >= MAJORITY {
            chunk.fill(true);
        } else if mode == SmoothingMode::Replace {
            chunk.fill(false);
        }
    }

    FrameSeries { values: out, frame_rate: series.frame_rate }
}

/// Maximal runs of anomalous frames, in ascending order.
pub fn extract_events(series: &FrameSeries) -> Vec<EventInterval> {
    let mut events = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, &v) in series.values().iter().enumerate() {
        match (v, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                events.push(EventInterval { start: s as u64, end: (i - 1) as u64 });
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        events.push(EventInterval { start: s as u64, end: (series.len() - 1) as u64 });
    }
    events
}

/// `extract_events(smooth(series))`.
pub fn postprocess(series: &FrameSeries) -> Vec<EventInterval> {
    postprocess_with(series, SmoothingMode::Replace)
}

pub fn postprocess_with(series: &FrameSeries, mode: SmoothingMode) -> Vec<EventInterval> {
    extract_events(&smooth_with(series, mode))
}
