//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use hitl_core::sim::{ClipRange, DelayDist, SimConfig};
use hitl_core::{EventInterval, FrameSeries, SmoothingMode};
use rand::Rng;

/// Smoothing by literally building the zero-padded grid and counting the
/// nine cells around every row.
pub fn smooth_oracle(flags: &[u8], mode: SmoothingMode) -> Vec<u8> {
    let rows = flags.len().div_ceil(3);
    // one zero row above and below, tail completed with zeros
    let mut grid = vec![[0u8; 3]; rows + 2];
    for (i, &f) in flags.iter().enumerate() {
        grid[i / 3 + 1][i % 3] = f;
    }
    let mut out = Vec::with_capacity(rows * 3);
    for r in 1..=rows {
        let mut count = 0;
        for dr in [r - 1, r, r + 1] {
            count += grid[dr].iter().map(|&v| v as usize).sum::<usize>();
        }
        let row = if count * 2 > 9 {
            [1, 1, 1]
        } else {
            match mode {
                SmoothingMode::Replace => [0, 0, 0],
                SmoothingMode::SetOnly => grid[r],
            }
        };
        out.extend_from_slice(&row);
    }
    out.truncate(flags.len());
    out
}

/// Run extraction by comparing each frame with its predecessor.
pub fn runs_oracle(flags: &[u8]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for i in 0..flags.len() {
        let starts = flags[i] == 1 && (i == 0 || flags[i - 1] == 0);
        if starts {
            let mut j = i;
            while j + 1 < flags.len() && flags[j + 1] == 1 {
                j += 1;
            }
            out.push((i as u64, j as u64));
        }
    }
    out
}

/// IoU by counting shared frames one at a time.
pub fn iou_oracle(a: (u64, u64), b: (u64, u64)) -> f64 {
    let lo = a.0.min(b.0);
    let hi = a.1.max(b.1);
    let (mut inter, mut union) = (0u64, 0u64);
    for f in lo..=hi {
        let in_a = (a.0..=a.1).contains(&f);
        let in_b = (b.0..=b.1).contains(&f);
        inter += u64::from(in_a && in_b);
        union += u64::from(in_a || in_b);
    }
    inter as f64 / union as f64
}

/// Naive greedy: repeatedly pick the best remaining pair by scanning every
/// unmatched combination. Returns (gt_index, pred_index) in acceptance order
/// over the canonically sorted lists.
pub fn greedy_oracle(gt: &[(u64, u64)], pred: &[(u64, u64)], threshold: f64) -> Vec<(usize, usize)> {
    let mut gt = gt.to_vec();
    let mut pred = pred.to_vec();
    gt.sort();
    pred.sort();
    let mut gt_free = vec![true; gt.len()];
    let mut pred_free = vec![true; pred.len()];
    let mut out = Vec::new();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for (gi, &g) in gt.iter().enumerate() {
            for (pi, &p) in pred.iter().enumerate() {
                if !gt_free[gi] || !pred_free[pi] {
                    continue;
                }
                let v = iou_oracle(g, p);
                if v <= threshold {
                    continue;
                }
                // strict > keeps the first (smallest gi, then pi) among ties
                if best.is_none_or(|(bv, _, _)| v > bv) {
                    best = Some((v, gi, pi));
                }
            }
        }
        let Some((_, gi, pi)) = best else { break };
        gt_free[gi] = false;
        pred_free[pi] = false;
        out.push((gi, pi));
    }
    out
}

/// Maximum one-to-one matching size by exhaustive search.
pub fn max_matching_oracle(gt: &[(u64, u64)], pred: &[(u64, u64)], threshold: f64) -> usize {
    fn go(i: usize, gt: &[(u64, u64)], pred: &[(u64, u64)], used: &mut Vec<bool>, thr: f64) -> usize {
        if i == gt.len() {
            return 0;
        }
        let mut best = go(i + 1, gt, pred, used, thr);
        for j in 0..pred.len() {
            if !used[j] && iou_oracle(gt[i], pred[j]) > thr {
                used[j] = true;
                best = best.max(1 + go(i + 1, gt, pred, used, thr));
                used[j] = false;
            }
        }
        best
    }
    go(0, gt, pred, &mut vec![false; pred.len()], threshold)
}

/// Nearest-rank percentile by its definition: the smallest sample value
/// that at least `percent`% of the sample does not exceed.
pub fn percentile_oracle(samples: &[f64], percent: u32) -> f64 {
    let n = samples.len();
    let mut candidates = samples.to_vec();
    candidates.sort_by(f64::total_cmp);
    for &x in &candidates {
        let at_most = samples.iter().filter(|&&s| s <= x).count();
        if at_most * 100 >= percent as usize * n && at_most > 0 {
            return x;
        }
    }
    candidates[n - 1]
}

/// Cronbach's alpha from the full covariance matrix:
/// `k/(k−1) · (1 − trace(C) / sum(C))`, population covariances.
pub fn alpha_oracle(rows: &[Vec<i64>]) -> f64 {
    let n = rows.len() as f64;
    let k = rows[0].len();
    let means: Vec<f64> = (0..k).map(|j| rows.iter().map(|r| r[j] as f64).sum::<f64>() / n).collect();
    let mut trace = 0.0;
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let cov = rows.iter().map(|r| (r[a] as f64 - means[a]) * (r[b] as f64 - means[b])).sum::<f64>() / n;
            total += cov;
            if a == b {
                trace += cov;
            }
        }
    }
    let k = k as f64;
    k / (k - 1.0) * (1.0 - trace / total)
}

pub fn intervals(pairs: &[(u64, u64)]) -> Vec<EventInterval> {
    pairs.iter().map(|&(s, e)| EventInterval::new(s, e).unwrap()).collect()
}

pub fn series(flags: &[u8]) -> FrameSeries {
    FrameSeries::from_flags(flags).unwrap()
}

/// Random intervals, possibly overlapping, within `[0, span)`.
pub fn random_intervals<R: Rng>(rng: &mut R, max_count: usize, span: u64) -> Vec<(u64, u64)> {
    let n = rng.random_range(0..=max_count);
    (0..n)
        .map(|_| {
            let s = rng.random_range(0..span);
            let len = rng.random_range(1..=span / 4);
            (s, s + len - 1)
        })
        .collect()
}

/// Random frame flags with a per-series anomaly density.
pub fn random_flags<R: Rng>(rng: &mut R, max_len: usize) -> Vec<u8> {
    let len = rng.random_range(0..=max_len);
    let density: f64 = [0.05, 0.2, 0.5, 0.8, 0.95][rng.random_range(0..5)];
    (0..len).map(|_| u8::from(rng.random::<f64>() < density)).collect()
}

/// Small but busy simulation config.
pub fn sim_config(seed: u64) -> SimConfig {
    SimConfig {
        seed,
        duration_s: 8.0 * 3600.0,
        num_operators: 3,
        true_event_rate_per_hr: 3.0,
        false_alarm_rate_per_hr: 9.0,
        operator_label_accuracy: 0.9,
        retrain_batch_size: 10,
        retrain_fp_decay: 0.85,
        smoothing_mode: SmoothingMode::Replace,
        clip_len_s: ClipRange::default(),
        notify_delay_s: DelayDist::Uniform { min: 0.5, max: 4.0 },
        operator_response_delay_s: DelayDist::LogNormal { mu: 3.5, sigma: 0.8 },
    }
}

/// Randomised config around [`sim_config`].
pub fn random_sim_config<R: Rng>(rng: &mut R) -> SimConfig {
    let mut c = sim_config(rng.random());
    c.duration_s = rng.random_range(600.0..6.0 * 3600.0);
    c.num_operators = rng.random_range(1..=6);
    c.true_event_rate_per_hr = rng.random_range(0.0..8.0);
    c.false_alarm_rate_per_hr = rng.random_range(0.0..20.0);
    c.operator_label_accuracy = rng.random_range(0.5..=1.0);
    c.retrain_batch_size = rng.random_range(1..20);
    c.retrain_fp_decay = rng.random_range(0.5..=1.0);
    let lo = rng.random_range(5.0..=10.0);
    c.clip_len_s = ClipRange { min: lo, max: rng.random_range(lo..=10.0) };
    c.notify_delay_s = match rng.random_range(0..3) {
        0 => DelayDist::Fixed { value: rng.random_range(0.0..5.0) },
        1 => DelayDist::Exponential { mean: rng.random_range(0.5..5.0) },
        _ => DelayDist::Uniform { min: 0.0, max: rng.random_range(0.0..5.0) },
    };
    c.operator_response_delay_s =
        DelayDist::LogNormal { mu: rng.random_range(2.0..4.5), sigma: rng.random_range(0.1..1.2) };
    c
}
