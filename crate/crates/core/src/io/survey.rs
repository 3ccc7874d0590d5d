//! Likert survey files.
//!
//! ```text
//! scale_min = 1
//! scale_max = 7
//! reverse = q2
//! q1,q2,q3
//! 5,3,4
//! 6,2,6
//! ```
//!
//! `scale_min` and `scale_max` are required, `reverse` is optional. The
//! first non-setting line names the items; each later line is one
//! respondent. `#` lines and empty lines are ignored.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::{numbered_lines, parse_int, ParseError};
use crate::metrics::{MetricsError, SurveyResponseSet};

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

pub fn parse_survey(text: &str) -> Result<SurveyResponseSet, ParseError> {
    let mut scale_min = None;
    let mut scale_max = None;
    let mut reverse: Option<(usize, Vec<String>)> = None;
    let mut items: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut row_lines = Vec::new();

    for (line, raw) in numbered_lines(text) {
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        if items.is_none() {
            if let Some((key, value)) = raw.split_once('=') {
                let (key, value) = (key.trim(), value.trim());
                let dup = || ParseError::at(line, format!("`{key}` given twice"));
                match key {
                    "scale_min" | "scale_max" => {
                        let v = parse_int(value).ok_or_else(|| {
                            ParseError::at(line, format!("`{key}` must be an integer, got {value:?}"))
                        })?;
                        let slot = if key == "scale_min" { &mut scale_min } else { &mut scale_max };
                        if slot.replace(v).is_some() {
                            return Err(dup());
                        }
                    }
                    "reverse" => {
                        let names: Vec<String> =
                            if value.is_empty() { Vec::new() } else { value.split(',').map(str::to_string).collect() };
                        if let Some(bad) = names.iter().find(|n| !valid_name(n)) {
                            return Err(ParseError::at(line, format!("invalid item name {bad:?}")));
                        }
                        if reverse.replace((line, names)).is_some() {
                            return Err(dup());
                        }
                    }
                    other => return Err(ParseError::at(line, format!("unknown setting {other:?}"))),
                }
                continue;
            }
            let names: Vec<String> = raw.split(',').map(str::to_string).collect();
            if let Some(bad) = names.iter().find(|n| !valid_name(n)) {
                return Err(ParseError::at(line, format!("invalid item name {bad:?}")));
            }
            let unique: BTreeSet<&String> = names.iter().collect();
            if unique.len() != names.len() {
                return Err(ParseError::at(line, "duplicate item names in header"));
            }
            items = Some(names);
            continue;
        }

        let cells = raw
            .split(',')
            .enumerate()
            .map(|(col, cell)| {
                parse_int(cell).ok_or_else(|| {
                    ParseError::at(
                        line,
                        format!("row {}, column {}: {cell:?} is not an integer", rows.len() + 1, col + 1),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(cells);
        row_lines.push(line);
    }

    let last_line = numbered_lines(text).last().map_or(1, |(l, _)| l);
    let scale_min = scale_min.ok_or_else(|| ParseError::at(last_line, "missing `scale_min`"))?;
    let scale_max = scale_max.ok_or_else(|| ParseError::at(last_line, "missing `scale_max`"))?;
    let items = items.ok_or_else(|| ParseError::at(last_line, "missing item header"))?;

    let mut reverse_idx = BTreeSet::new();
    if let Some((line, names)) = reverse {
        for name in names {
            let idx = items
                .iter()
                .position(|i| *i == name)
                .ok_or_else(|| ParseError::at(line, format!("reverse-coded item {name:?} is not in the header")))?;
            reverse_idx.insert(idx);
        }
    }

    SurveyResponseSet::new(items.clone(), rows, reverse_idx, scale_min, scale_max).map_err(|e| match e {
        MetricsError::ScoreOutOfRange { row, column, value, min, max } => ParseError::at(
            row_lines[row],
            format!("row {}, column {} ({}): score {value} outside [{min}, {max}]", row + 1, column + 1, items[column]),
        ),
        MetricsError::RaggedRow { row, got, expected } => {
            ParseError::at(row_lines[row], format!("row {}: {got} scores, expected {expected}", row + 1))
        }
        other => ParseError::at(last_line, other.to_string()),
    })
}

pub fn write_survey(survey: &SurveyResponseSet) -> String {
    let (min, max) = survey.scale();
    let names = survey.item_names();
    let reverse: Vec<&str> = survey.reverse_coded().iter().map(|&i| names[i].as_str()).collect();
    let mut out = format!("scale_min = {min}\nscale_max = {max}\n");
    if reverse.is_empty() {
        out.push_str("reverse =\n");
    } else {
        let _ = writeln!(out, "reverse = {}", reverse.join(","));
    }
    out.push_str(&names.join(","));
    out.push('\n');
    for row in survey.rows() {
        let cells: Vec<String> = row.iter().map(i64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
