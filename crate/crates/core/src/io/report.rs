//! JSON and plain-table rendering of a [`MetricsBundle`].

use std::fmt::Write;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::matching::MatchReport;
use crate::metrics::{detection_fnr, LatencyStats, LogMetrics, MetricsBundle, TrustReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Json,
    #[default]
    Table,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "table" => Ok(ReportFormat::Table),
            other => Err(format!("unknown format {other:?} (expected json or table)")),
        }
    }
}

/// Optional ANSI styling for section titles in table output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableStyle {
    #[default]
    Plain,
    Bold,
}

/// Rounds to 6 significant digits.
fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn jnum(x: Option<f64>) -> Value {
    match x {
        Some(v) => json!(sig6(v)),
        None => Value::Null,
    }
}

/// Table cell text: 6 significant digits, or `n/a`.
pub fn format_value(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{}", sig6(v)),
        None => "n/a".to_string(),
    }
}

fn detection_json(r: &MatchReport) -> Value {
    let matches: Vec<Value> = r
        .matches
        .iter()
        .map(|m| json!({"gt_index": m.gt_index, "pred_index": m.pred_index, "iou": sig6(m.iou)}))
        .collect();
    json!({
        "gt_events": r.gt_count,
        "predicted_events": r.pred_count,
        "tp": r.tp,
        "fp": r.fp,
        "fn": r.fn_,
        "iou_threshold": r.threshold,
        "precision": jnum(r.precision),
        "recall": jnum(r.recall),
        "detection_fnr": jnum(detection_fnr(r)),
        "matches": matches,
        "warnings": r.warnings,
    })
}

fn latency_json(s: &LatencyStats) -> Value {
    json!({
        "n": s.n,
        "mean_s": jnum(s.mean_s),
        "median_s": jnum(s.median_s),
        "p90_s": jnum(s.p90_s),
        "p99_s": jnum(s.p99_s),
        "max_s": jnum(s.max_s),
    })
}

fn log_json(m: &LogMetrics) -> Value {
    json!({
        "alerts": m.alerts,
        "labels": m.labels,
        "retrains": m.retrains,
        "feedback_fpr": jnum(m.feedback_fpr),
        "oracle_fpr": jnum(m.oracle_fpr),
        "technical_latency": latency_json(&m.technical_latency),
        "organizational_latency": latency_json(&m.organizational_latency),
        "adaptation_time_s": jnum(m.adaptation_time_s),
        "adaptation": {
            "window_s": m.adaptation.window_s,
            "cv_threshold": m.adaptation.cv_threshold,
            "stable_windows": m.adaptation.stable_windows,
        },
    })
}

fn trust_json(t: &TrustReport) -> Value {
    json!({
        "respondents": t.respondents,
        "items": t.items,
        "per_respondent_score": t.per_respondent_score.iter().map(|&s| sig6(s)).collect::<Vec<_>>(),
        "overall_mean": jnum(t.overall_mean),
        "overall_sd": jnum(t.overall_sd),
        "cronbach_alpha": jnum(t.cronbach_alpha),
        "alpha_error": t.alpha_error,
    })
}

fn to_json(bundle: &MetricsBundle) -> Value {
    let mut root = Map::new();
    if let Some(r) = &bundle.detection {
        root.insert("detection".into(), detection_json(r));
    }
    if let Some(m) = &bundle.log {
        root.insert("log".into(), log_json(m));
    }
    if let Some(t) = &bundle.trust {
        root.insert("trust".into(), trust_json(t));
    }
    Value::Object(root)
}

struct Table {
    out: String,
    style: TableStyle,
}

const LABEL_WIDTH: usize = 30;
const VALUE_WIDTH: usize = 12;

impl Table {
    fn title(&mut self, text: &str) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        match self.style {
            TableStyle::Plain => self.out.push_str(text),
            TableStyle::Bold => {
                let _ = write!(self.out, "\x1b[1m{text}\x1b[0m");
            }
        }
        self.out.push('\n');
    }

    fn rule(&mut self) {
        self.out.push_str(&"-".repeat(LABEL_WIDTH + VALUE_WIDTH));
        self.out.push('\n');
    }

    fn row(&mut self, label: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{label:<LABEL_WIDTH$}{value:>VALUE_WIDTH$}");
    }

    fn latency(&mut self, name: &str, s: &LatencyStats) {
        self.row(&format!("{name} n"), s.n);
        for (stat, v) in [
            ("mean (s)", s.mean_s),
            ("median (s)", s.median_s),
            ("p90 (s)", s.p90_s),
            ("p99 (s)", s.p99_s),
            ("max (s)", s.max_s),
        ] {
            self.row(&format!("{name} {stat}"), format_value(v));
        }
    }
}

/// Plain-text tables. The detection block lists the five detection counts
/// (GT events, Predicted events, TP/FP/FN_detection) before the rates.
pub fn render_table(bundle: &MetricsBundle, style: TableStyle) -> String {
    let mut t = Table { out: String::new(), style };
    if let Some(r) = &bundle.detection {
        t.title(&format!("Event detection (IoU > {})", r.threshold));
        t.row("Metric", "Count");
        t.rule();
        t.row("GT events", r.gt_count);
        t.row("Predicted events", r.pred_count);
        t.row("TP_detection", r.tp);
        t.row("FP_detection", r.fp);
        t.row("FN_detection", r.fn_);
        t.rule();
        t.row("Precision", format_value(r.precision));
        t.row("Recall", format_value(r.recall));
        t.row("Detection FNR", format_value(detection_fnr(r)));
        for w in &r.warnings {
            let _ = writeln!(t.out, "warning: {w}");
        }
    }
    if let Some(m) = &bundle.log {
        t.title("Operational metrics");
        t.row("Alerts", m.alerts);
        t.row("Labels", m.labels);
        t.row("Retrains", m.retrains);
        t.row("Feedback FPR", format_value(m.feedback_fpr));
        t.row("Oracle FPR", format_value(m.oracle_fpr));
        t.latency("Technical latency", &m.technical_latency);
        t.latency("Org. latency", &m.organizational_latency);
        t.row("Adaptation time (s)", format_value(m.adaptation_time_s));
    }
    if let Some(tr) = &bundle.trust {
        t.title("Trust survey");
        t.row("Respondents", tr.respondents);
        t.row("Items", tr.items);
        t.row("Mean score", format_value(tr.overall_mean));
        t.row("SD (population)", format_value(tr.overall_sd));
        t.row("Cronbach's alpha", format_value(tr.cronbach_alpha));
        if let Some(e) = &tr.alpha_error {
            let _ = writeln!(t.out, "note: alpha unavailable: {e}");
        }
    }
    if t.out.is_empty() {
        t.out.push_str("no metrics\n");
    }
    t.out
}

/// Renders a bundle. JSON has sorted keys and numbers rounded to 6
/// significant digits; absent values are `null` in JSON and `n/a` in tables.
pub fn render_report(bundle: &MetricsBundle, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&to_json(bundle)).expect("json values serialize");
            s.push('\n');
            s
        }
        ReportFormat::Table => render_table(bundle, TableStyle::Plain),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::AdaptationParams;

    fn reference_counts() -> MetricsBundle {
        MetricsBundle { detection: Some(MatchReport::from_counts(40, 41, 30).unwrap()), ..Default::default() }
    }

    #[test]
    fn sig_digits() {
        assert_eq!(sig6(30.0 / 41.0), 0.731707);
        assert_eq!(sig6(1234567.0), 1234570.0);
        assert_eq!(sig6(0.0), 0.0);
    }

    #[test]
    fn reference_layout() {
        let text = render_report(&reference_counts(), ReportFormat::Table);
        let rows: Vec<(String, String)> = text
            .lines()
            .filter_map(|l| l.rsplit_once(' ').map(|(a, b)| (a.trim().to_string(), b.to_string())))
            .collect();
        let get = |k: &str| rows.iter().find(|(a, _)| a == k).map(|(_, b)| b.as_str());
        assert_eq!(get("GT events"), Some("40"));
        assert_eq!(get("Predicted events"), Some("41"));
        assert_eq!(get("TP_detection"), Some("30"));
        assert_eq!(get("FP_detection"), Some("11"));
        assert_eq!(get("FN_detection"), Some("10"));
        assert_eq!(get("Precision"), Some("0.731707"));
        assert_eq!(get("Recall"), Some("0.75"));
    }

    #[test]
    fn json_sorted_and_stable() {
        let a = render_report(&reference_counts(), ReportFormat::Json);
        assert_eq!(a, render_report(&reference_counts(), ReportFormat::Json));
        let v: Value = serde_json::from_str(&a).unwrap();
        let keys: Vec<&String> = v["detection"].as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(v["detection"]["precision"], json!(0.731707));
    }

    #[test]
    fn absent_values_render_as_na() {
        let log = crate::sim::EventLog::default();
        let bundle = MetricsBundle {
            detection: Some(MatchReport::from_counts(0, 0, 0).unwrap()),
            log: Some(LogMetrics::compute(&log, AdaptationParams::default()).unwrap()),
            trust: None,
        };
        let table = render_report(&bundle, ReportFormat::Table);
        assert!(table.contains("n/a"));
        assert!(!table.contains("NaN"));
        let v: Value = serde_json::from_str(&render_report(&bundle, ReportFormat::Json)).unwrap();
        assert!(v["log"]["feedback_fpr"].is_null());
        assert!(v["detection"]["precision"].is_null());
    }

    #[test]
    fn bold_titles() {
        let text = render_table(&reference_counts(), TableStyle::Bold);
        assert!(text.starts_with("\x1b[1m"));
    }
}
