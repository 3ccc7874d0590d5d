//! JSON-lines event logs.
//!
//! One object per line with keys in a fixed order: `seq`, `t_s`, `kind`,
//! then the kind's own fields. Times are decimal seconds with exactly three
//! decimals; rates use the shortest representation that round-trips. The
//! parser accepts only canonical lines, so a file is valid exactly when
//! re-serializing it reproduces it byte for byte.

use serde_json::{Map, Value};

use super::{numbered_lines, ParseError};
use crate::sim::{EntryKind, EventId, EventLog, LabelValue, LogEntry, OperatorId, Timestamp};

fn num(x: f64) -> String {
    // Display for f64 is shortest-round-trip and never uses exponents.
    format!("{x}")
}

/// Canonical single-line form of one entry, without the trailing LF.
pub fn write_entry(entry: &LogEntry) -> String {
    let head = format!("{{\"seq\":{},\"t_s\":{},\"kind\":\"{}\"", entry.seq, entry.t, entry.kind.name());
    let body = match &entry.kind {
        EntryKind::Deployment { num_operators, true_event_rate_per_hr, false_alarm_rate_per_hr } => format!(
            ",\"num_operators\":{num_operators},\"true_event_rate_per_hr\":{},\"false_alarm_rate_per_hr\":{}",
            num(*true_event_rate_per_hr),
            num(*false_alarm_rate_per_hr)
        ),
        EntryKind::Detection { event_id, clip_start, clip_end, is_true_anomaly } => format!(
            ",\"event_id\":{},\"clip_start_s\":{clip_start},\"clip_end_s\":{clip_end},\"is_true_anomaly\":{is_true_anomaly}",
            event_id.0
        ),
        EntryKind::Notification { event_id } => format!(",\"event_id\":{}", event_id.0),
        EntryKind::QueueInsert { event_id, operator_id }
        | EntryKind::QueueRemove { event_id, operator_id }
        | EntryKind::LabelRejected { event_id, operator_id }
        | EntryKind::Action { event_id, operator_id } => {
            format!(",\"event_id\":{},\"operator_id\":{}", event_id.0, operator_id.0)
        }
        EntryKind::Label { event_id, operator_id, value } => format!(
            ",\"event_id\":{},\"operator_id\":{},\"value\":{}",
            event_id.0,
            operator_id.0,
            value.as_i8()
        ),
        EntryKind::Retrain { labels, old_false_alarm_rate_per_hr, new_false_alarm_rate_per_hr } => format!(
            ",\"labels\":{labels},\"old_false_alarm_rate_per_hr\":{},\"new_false_alarm_rate_per_hr\":{}",
            num(*old_false_alarm_rate_per_hr),
            num(*new_false_alarm_rate_per_hr)
        ),
    };
    format!("{head}{body}}}")
}

pub fn write_log(log: &EventLog) -> String {
    let mut out = String::new();
    for entry in log.entries() {
        out.push_str(&write_entry(entry));
        out.push('\n');
    }
    out
}

struct Fields<'a> {
    line: usize,
    map: &'a Map<String, Value>,
}

impl Fields<'_> {
    fn get(&self, key: &str) -> Result<&Value, ParseError> {
        self.map.get(key).ok_or_else(|| ParseError::at(self.line, format!("missing field `{key}`")))
    }

    fn uint(&self, key: &str) -> Result<u64, ParseError> {
        self.get(key)?
            .as_u64()
            .ok_or_else(|| ParseError::at(self.line, format!("field `{key}` must be a non-negative integer")))
    }

    fn u32(&self, key: &str) -> Result<u32, ParseError> {
        u32::try_from(self.uint(key)?).map_err(|_| ParseError::at(self.line, format!("field `{key}` is too large")))
    }

    fn float(&self, key: &str) -> Result<f64, ParseError> {
        self.get(key)?.as_f64().ok_or_else(|| ParseError::at(self.line, format!("field `{key}` must be a number")))
    }

    fn time(&self, key: &str) -> Result<Timestamp, ParseError> {
        let secs = self.float(key)?;
        if secs < 0.0 {
            return Err(ParseError::at(self.line, format!("field `{key}` must be non-negative")));
        }
        Ok(Timestamp::from_secs_f64(secs))
    }

    fn boolean(&self, key: &str) -> Result<bool, ParseError> {
        self.get(key)?
            .as_bool()
            .ok_or_else(|| ParseError::at(self.line, format!("field `{key}` must be true or false")))
    }

    fn event(&self) -> Result<EventId, ParseError> {
        self.uint("event_id").map(EventId)
    }

    fn operator(&self) -> Result<OperatorId, ParseError> {
        self.u32("operator_id").map(OperatorId)
    }

    fn expect_keys(&self, extra: &[&str]) -> Result<(), ParseError> {
        let allowed = |k: &str| ["seq", "t_s", "kind"].contains(&k) || extra.contains(&k);
        if let Some(unknown) = self.map.keys().find(|k| !allowed(k)) {
            return Err(ParseError::at(self.line, format!("unexpected field `{unknown}`")));
        }
        Ok(())
    }
}

fn parse_line(line: usize, raw: &str) -> Result<LogEntry, ParseError> {
    let value: Value = serde_json::from_str(raw).map_err(|e| ParseError::at(line, format!("invalid JSON: {e}")))?;
    let map = value.as_object().ok_or_else(|| ParseError::at(line, "record must be a JSON object"))?;
    let f = Fields { line, map };
    let seq = f.uint("seq")?;
    let t = f.time("t_s")?;
    let kind_name = f.get("kind")?.as_str().ok_or_else(|| ParseError::at(line, "field `kind` must be a string"))?;

    let kind = match kind_name {
        "deployment" => {
            f.expect_keys(&["num_operators", "true_event_rate_per_hr", "false_alarm_rate_per_hr"])?;
            EntryKind::Deployment {
                num_operators: f.u32("num_operators")?,
                true_event_rate_per_hr: f.float("true_event_rate_per_hr")?,
                false_alarm_rate_per_hr: f.float("false_alarm_rate_per_hr")?,
            }
        }
        "detection" => {
            f.expect_keys(&["event_id", "clip_start_s", "clip_end_s", "is_true_anomaly"])?;
            EntryKind::Detection {
                event_id: f.event()?,
                clip_start: f.time("clip_start_s")?,
                clip_end: f.time("clip_end_s")?,
                is_true_anomaly: f.boolean("is_true_anomaly")?,
            }
        }
        "notification" => {
            f.expect_keys(&["event_id"])?;
            EntryKind::Notification { event_id: f.event()? }
        }
        "queue_insert" | "queue_remove" | "label_rejected" | "action" => {
            f.expect_keys(&["event_id", "operator_id"])?;
            let (event_id, operator_id) = (f.event()?, f.operator()?);
            match kind_name {
                "queue_insert" => EntryKind::QueueInsert { event_id, operator_id },
                "queue_remove" => EntryKind::QueueRemove { event_id, operator_id },
                "label_rejected" => EntryKind::LabelRejected { event_id, operator_id },
                _ => EntryKind::Action { event_id, operator_id },
            }
        }
        "label" => {
            f.expect_keys(&["event_id", "operator_id", "value"])?;
            let value = f
                .get("value")?
                .as_i64()
                .and_then(LabelValue::from_i64)
                .ok_or_else(|| ParseError::at(line, "field `value` must be 1 or -1"))?;
            EntryKind::Label { event_id: f.event()?, operator_id: f.operator()?, value }
        }
        "retrain" => {
            f.expect_keys(&["labels", "old_false_alarm_rate_per_hr", "new_false_alarm_rate_per_hr"])?;
            EntryKind::Retrain {
                labels: f.uint("labels")?,
                old_false_alarm_rate_per_hr: f.float("old_false_alarm_rate_per_hr")?,
                new_false_alarm_rate_per_hr: f.float("new_false_alarm_rate_per_hr")?,
            }
        }
        other => return Err(ParseError::at(line, format!("unknown kind {other:?}"))),
    };

    let entry = LogEntry { seq, t, kind };
    if write_entry(&entry) != raw {
        return Err(ParseError::at(line, "record is not in canonical form"));
    }
    Ok(entry)
}

/// Parses a canonical log. Blank lines are not allowed.
pub fn parse_log(text: &str) -> Result<EventLog, ParseError> {
    let entries = numbered_lines(text).map(|(line, raw)| parse_line(line, raw)).collect::<Result<Vec<_>, _>>()?;
    EventLog::from_entries(entries).map_err(|e| ParseError::at(e.index() + 1, e.to_string()))
}
