//! `start_frame,end_frame` interval files.

use std::fmt::Write;

use super::{numbered_lines, parse_uint, ParseError};
use crate::frames::EventInterval;

pub const INTERVAL_HEADER: &str = "start_frame,end_frame";

/// Parses an interval file into canonical `(start, end)` order.
///
/// `#` lines and empty lines are ignored. The header may appear once,
/// before the first record.
pub fn parse_intervals(text: &str) -> Result<Vec<EventInterval>, ParseError> {
    let mut out = Vec::new();
    let mut header_allowed = true;
    for (line, raw) in numbered_lines(text) {
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        if raw == INTERVAL_HEADER && header_allowed {
            header_allowed = false;
            continue;
        }
        header_allowed = false;
        let (start, end) = raw
            .split_once(',')
            .ok_or_else(|| ParseError::at(line, format!("expected `start_frame,end_frame`, got {raw:?}")))?;
        let start = parse_uint(start)
            .ok_or_else(|| ParseError::at(line, format!("start frame {start:?} is not a non-negative integer")))?;
        let end = parse_uint(end)
            .ok_or_else(|| ParseError::at(line, format!("end frame {end:?} is not a non-negative integer")))?;
        let iv = EventInterval::new(start, end).map_err(|e| ParseError::at(line, e.to_string()))?;
        out.push(iv);
    }
    out.sort();
    Ok(out)
}

/// Header plus one canonical-order record per line.
pub fn write_intervals(intervals: &[EventInterval]) -> String {
    let mut sorted = intervals.to_vec();
    sorted.sort();
    let mut out = format!("{INTERVAL_HEADER}\n");
    for iv in sorted {
        let _ = writeln!(out, "{},{}", iv.start(), iv.end());
    }
    out
}
