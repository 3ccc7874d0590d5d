//! Line-delimited file formats and report rendering.
//!
//! Every format has a canonical writer; parsers are strict and report the
//! 1-based line of the first problem. Canonical output is UTF-8 with LF
//! line endings.

mod frames;
mod intervals;
mod log;
mod report;
mod survey;

use std::fs;
use std::path::Path;

use thiserror::Error;

pub use self::frames::{parse_frames, write_frames, write_frames_compact};
pub use self::intervals::{parse_intervals, write_intervals};
pub use self::log::{parse_log, write_entry, write_log};
pub use self::report::{format_value, render_report, render_table, ReportFormat, TableStyle};
pub use self::survey::{parse_survey, write_survey};

use crate::frames::{EventInterval, FrameSeries};
use crate::metrics::SurveyResponseSet;
use crate::sim::EventLog;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

impl ParseError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line { line, message: message.into() }
    }

    /// 1-based line of the problem, when the error came from file content.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Line { line, .. } => Some(*line),
            ParseError::Io { .. } => None,
        }
    }
}

fn read_text(path: &Path) -> Result<String, ParseError> {
    fs::read_to_string(path).map_err(|source| ParseError::Io { path: path.display().to_string(), source })
}

fn write_text(path: &Path, text: &str) -> Result<(), ParseError> {
    fs::write(path, text).map_err(|source| ParseError::Io { path: path.display().to_string(), source })
}

/// Splits into numbered lines. A single trailing LF is allowed.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let lines: Box<dyn Iterator<Item = &str>> =
        if body.is_empty() { Box::new(std::iter::empty()) } else { Box::new(body.split('\n')) };
    lines.enumerate().map(|(i, l)| (i + 1, l))
}

/// Non-negative decimal integer made of ASCII digits only.
pub(crate) fn parse_uint(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Optionally negative decimal integer.
pub(crate) fn parse_int(s: &str) -> Option<i64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    parse_uint(digits)?;
    s.parse().ok()
}

pub fn read_intervals(path: impl AsRef<Path>) -> Result<Vec<EventInterval>, ParseError> {
    parse_intervals(&read_text(path.as_ref())?)
}

pub fn write_intervals_file(path: impl AsRef<Path>, intervals: &[EventInterval]) -> Result<(), ParseError> {
    write_text(path.as_ref(), &write_intervals(intervals))
}

pub fn read_frames(path: impl AsRef<Path>) -> Result<FrameSeries, ParseError> {
    parse_frames(&read_text(path.as_ref())?)
}

pub fn write_frames_file(path: impl AsRef<Path>, series: &FrameSeries) -> Result<(), ParseError> {
    write_text(path.as_ref(), &write_frames(series))
}

pub fn read_log(path: impl AsRef<Path>) -> Result<EventLog, ParseError> {
    parse_log(&read_text(path.as_ref())?)
}

pub fn write_log_file(path: impl AsRef<Path>, log: &EventLog) -> Result<(), ParseError> {
    write_text(path.as_ref(), &write_log(log))
}

pub fn read_survey(path: impl AsRef<Path>) -> Result<SurveyResponseSet, ParseError> {
    parse_survey(&read_text(path.as_ref())?)
}

pub fn write_survey_file(path: impl AsRef<Path>, survey: &SurveyResponseSet) -> Result<(), ParseError> {
    write_text(path.as_ref(), &write_survey(survey))
}
