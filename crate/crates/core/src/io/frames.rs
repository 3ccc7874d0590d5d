//! Frame flag files: `frame_index,flag` records or one bitstring line.
//!
//! ```text
//! frame_rate = 25
//! frame_index,flag
//! 0,0
//! 1,1
//! ```
//!
//! The compact form replaces the header and records with a single line such
//! as `0110`. The `frame_rate` line is optional in both forms.

use std::fmt::Write;

use super::{numbered_lines, parse_uint, ParseError};
use crate::frames::FrameSeries;

pub const FRAME_HEADER: &str = "frame_index,flag";

fn parse_flag(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

pub fn parse_frames(text: &str) -> Result<FrameSeries, ParseError> {
    let mut frame_rate = None;
    let mut values = Vec::new();
    let mut saw_header = false;
    let mut compact = false;

    for (line, raw) in numbered_lines(text) {
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = raw.split_once('=') {
            if key.trim() != "frame_rate" {
                return Err(ParseError::at(line, format!("unknown setting {:?}", key.trim())));
            }
            if frame_rate.is_some() || saw_header || compact || !values.is_empty() {
                return Err(ParseError::at(line, "frame_rate must appear once, before the frames"));
            }
            let fps: f64 = value
                .trim()
                .parse()
                .map_err(|_| ParseError::at(line, format!("frame rate {:?} is not a number", value.trim())))?;
            if !(fps.is_finite() && fps > 0.0) {
                return Err(ParseError::at(line, "frame rate must be finite and positive"));
            }
            frame_rate = Some(fps);
            continue;
        }
        if compact {
            return Err(ParseError::at(line, "nothing may follow a bitstring line"));
        }
        if raw == FRAME_HEADER {
            if saw_header || !values.is_empty() {
                return Err(ParseError::at(line, "header must come before the frames"));
            }
            saw_header = true;
            continue;
        }
        match raw.split_once(',') {
            Some((index, flag)) => {
                let index = parse_uint(index)
                    .ok_or_else(|| ParseError::at(line, format!("frame index {index:?} is not an integer")))?;
                if index != values.len() as u64 {
                    return Err(ParseError::at(line, format!("expected frame index {}, got {index}", values.len())));
                }
                let flag =
                    parse_flag(flag).ok_or_else(|| ParseError::at(line, format!("flag {flag:?} must be 0 or 1")))?;
                values.push(flag);
            }
            None => {
                if saw_header || !values.is_empty() {
                    return Err(ParseError::at(line, format!("expected `frame_index,flag`, got {raw:?}")));
                }
                values = raw
                    .bytes()
                    .map(|b| match b {
                        b'0' => Ok(false),
                        b'1' => Ok(true),
                        _ => Err(ParseError::at(line, format!("bitstring may contain only 0 and 1, got {raw:?}"))),
                    })
                    .collect::<Result<_, _>>()?;
                compact = true;
            }
        }
    }

    let series = FrameSeries::new(values);
    match frame_rate {
        Some(fps) => Ok(series.with_frame_rate(fps).expect("validated above")),
        None => Ok(series),
    }
}

fn rate_line(series: &FrameSeries) -> String {
    series.frame_rate().map(|fps| format!("frame_rate = {fps}\n")).unwrap_or_default()
}

/// Canonical per-frame form.
pub fn write_frames(series: &FrameSeries) -> String {
    let mut out = rate_line(series);
    out.push_str(FRAME_HEADER);
    out.push('\n');
    for (i, &v) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{i},{}", u8::from(v));
    }
    out
}

/// Single-line bitstring form.
pub fn write_frames_compact(series: &FrameSeries) -> String {
    let mut out = rate_line(series);
    out.extend(series.values().iter().map(|&v| if v { '1' } else { '0' }));
    out.push('\n');
    out
}
