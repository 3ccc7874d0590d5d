//! IoU matching of predicted events against ground truth.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::EventInterval;

/// A prediction is correct only when its IoU strictly exceeds this.
pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("IoU threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("inconsistent counts: tp={tp}, gt={gt_count}, pred={pred_count}")]
    InconsistentCounts { gt_count: usize, pred_count: usize, tp: usize },
}

/// Intersection over union of two inclusive frame ranges.
pub fn iou(a: &EventInterval, b: &EventInterval) -> f64 {
    let lo = a.start().max(b.start());
    let hi = a.end().min(b.end());
    if lo > hi {
        return 0.0;
    }
    let inter = hi - lo + 1;
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// One accepted ground-truth/prediction pair. Indices refer to the
/// canonically sorted input lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventMatch {
    pub gt_index: usize,
    pub pred_index: usize,
    pub iou: f64,
}

/// Detection counts for one ground-truth vs prediction comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub gt_count: usize,
    pub pred_count: usize,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub threshold: f64,
    pub matches: Vec<EventMatch>,
    /// `None` when there are no predictions.
    pub precision: Option<f64>,
    /// `None` when there is no ground truth.
    pub recall: Option<f64>,
    pub warnings: Vec<String>,
}

impl MatchReport {
    /// Report carrying counts only (no pair list).
    pub fn from_counts(gt_count: usize, pred_count: usize, tp: usize) -> Result<Self, MatchError> {
        if tp > gt_count || tp > pred_count {
            return Err(MatchError::InconsistentCounts { gt_count, pred_count, tp });
        }
        let (precision, recall) = rates(tp, gt_count, pred_count);
        Ok(Self {
            gt_count,
            pred_count,
            tp,
            fp: pred_count - tp,
            fn_: gt_count - tp,
            threshold: DEFAULT_IOU_THRESHOLD,
            matches: Vec::new(),
            precision,
            recall,
            warnings: Vec::new(),
        })
    }
}

fn rates(tp: usize, gt_count: usize, pred_count: usize) -> (Option<f64>, Option<f64>) {
    let ratio = |den: usize| (den > 0).then(|| tp as f64 / den as f64);
    (ratio(pred_count), ratio(gt_count))
}

/// `(tp / pred_count, tp / gt_count)`, each `None` on a zero denominator.
pub fn precision_recall(report: &MatchReport) -> (Option<f64>, Option<f64>) {
    rates(report.tp, report.gt_count, report.pred_count)
}

fn canonical(list: &[EventInterval]) -> Vec<EventInterval> {
    let mut sorted = list.to_vec();
    sorted.sort();
    sorted
}

fn overlap_warnings(side: &str, sorted: &[EventInterval]) -> Vec<String> {
    sorted
        .windows(2)
        .filter(|w| w[0].overlaps(&w[1]))
        .map(|w| format!("{side} intervals {} and {} overlap", w[0], w[1]))
        .collect()
}

/// Greedy one-to-one matching by descending IoU.
///
/// Both lists are sorted by `(start, end)` first. Candidate pairs need
/// `iou > threshold`; ties in IoU go to the smaller gt index, then the
/// smaller prediction index.
pub fn match_events(gt: &[EventInterval], pred: &[EventInterval], threshold: f64) -> Result<MatchReport, MatchError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(MatchError::InvalidThreshold(threshold));
    }
    let gt = canonical(gt);
    let pred = canonical(pred);

    let mut candidates: Vec<EventMatch> = Vec::new();
    for (gi, g) in gt.iter().enumerate() {
        for (pi, p) in pred.iter().enumerate() {
            let score = iou(g, p);
            if score > threshold {
                candidates.push(EventMatch { gt_index: gi, pred_index: pi, iou: score });
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.iou.total_cmp(&a.iou).then(a.gt_index.cmp(&b.gt_index)).then(a.pred_index.cmp(&b.pred_index))
    });

    let mut gt_used = vec![false; gt.len()];
    let mut pred_used = vec![false; pred.len()];
    let mut matches = Vec::new();
    for c in candidates {
        if !gt_used[c.gt_index] && !pred_used[c.pred_index] {
            gt_used[c.gt_index] = true;
            pred_used[c.pred_index] = true;
            matches.push(c);
        }
    }

    let tp = matches.len();
    let (precision, recall) = rates(tp, gt.len(), pred.len());
    let mut warnings = overlap_warnings("ground-truth", &gt);
    warnings.extend(overlap_warnings("predicted", &pred));

    Ok(MatchReport {
        gt_count: gt.len(),
        pred_count: pred.len(),
        tp,
        fp: pred.len() - tp,
        fn_: gt.len() - tp,
        threshold,
        matches,
        precision,
        recall,
        warnings,
    })
}
