//! Adaptation time as a rolling-stability detector over organizational latency.
//!
//! The run is cut into consecutive windows of `window_s` starting at
//! deployment. Each action falls into the window containing its time, and a
//! window's value is the mean latency of its actions. Adaptation time is the
//! end of the first run of `stable_windows` consecutive non-empty windows
//! whose means have a coefficient of variation at most `cv_threshold`.

use serde::Serialize;

use super::latency::organizational_latency_samples;
use super::MetricsError;
use crate::sim::EventLog;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptationParams {
    pub window_s: f64,
    pub cv_threshold: f64,
    pub stable_windows: usize,
}

impl Default for AdaptationParams {
    fn default() -> Self {
        Self { window_s: 3600.0, cv_threshold: 0.1, stable_windows: 3 }
    }
}

impl AdaptationParams {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let bad = |name, reason: &str| Err(MetricsError::InvalidParameter { name, reason: reason.into() });
        if !(self.window_s.is_finite() && self.window_s > 0.0) {
            return bad("window_s", "must be positive");
        }
        if !(self.cv_threshold.is_finite() && self.cv_threshold > 0.0) {
            return bad("cv_threshold", "must be positive");
        }
        if self.stable_windows < 1 {
            return bad("stable_windows", "must be at least 1");
        }
        Ok(())
    }
}

/// Population coefficient of variation; zero spread counts as 0.
fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var == 0.0 {
        0.0
    } else if mean == 0.0 {
        f64::INFINITY
    } else {
        var.sqrt() / mean.abs()
    }
}

/// Per-window mean organizational latency, `None` for windows without actions.
pub fn window_means(log: &EventLog, window_s: f64) -> Vec<Option<f64>> {
    let Some(deployed) = log.deployment_time() else { return Vec::new() };
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for (acted, latency) in organizational_latency_samples(log) {
        let offset = acted.secs_since(deployed).max(0.0);
        let idx = (offset / window_s).floor() as usize;
        if sums.len() <= idx {
            sums.resize(idx + 1, (0.0, 0));
        }
        sums[idx].0 += latency;
        sums[idx].1 += 1;
    }
    sums.into_iter().map(|(s, c)| (c > 0).then(|| s / c as f64)).collect()
}

/// Seconds from deployment until stable integration, or `None` if never stable.
pub fn adaptation_time(log: &EventLog, params: AdaptationParams) -> Result<Option<f64>, MetricsError> {
    params.validate()?;
    let means = window_means(log, params.window_s);
    let k = params.stable_windows;
    if means.len() < k {
        return Ok(None);
    }
    for start in 0..=means.len() - k {
        let run: Option<Vec<f64>> = means[start..start + k].iter().copied().collect();
        if let Some(run) = run {
            if coefficient_of_variation(&run) <= params.cv_threshold {
                return Ok(Some((start + k) as f64 * params.window_s));
            }
        }
    }
    Ok(None)
}
