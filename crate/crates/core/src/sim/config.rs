//! Simulation configuration, loaded from TOML.

use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Uniform};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::SmoothingMode;

/// Allowed bounds on an alert clip's duration, in seconds.
pub const CLIP_MIN_S: f64 = 5.0;
pub const CLIP_MAX_S: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.to_string(), reason: reason.into() }
    }
}

/// Non-negative delay distribution, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayDist {
    Fixed {
        value: f64,
    },
    Uniform {
        min: f64,
        max: f64,
    },
    Exponential {
        mean: f64,
    },
    /// `exp(N(mu, sigma²))`.
    LogNormal {
        mu: f64,
        sigma: f64,
    },
}

impl DelayDist {
    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(field, format!("{name} must be finite")))
            }
        };
        match *self {
            DelayDist::Fixed { value } => {
                finite("value", value)?;
                if value < 0.0 {
                    return Err(ConfigError::invalid(field, "value must be non-negative"));
                }
            }
            DelayDist::Uniform { min, max } => {
                finite("min", min)?;
                finite("max", max)?;
                if min < 0.0 || max < min {
                    return Err(ConfigError::invalid(field, "need 0 <= min <= max"));
                }
            }
            DelayDist::Exponential { mean } => {
                finite("mean", mean)?;
                if mean <= 0.0 {
                    return Err(ConfigError::invalid(field, "mean must be positive"));
                }
            }
            DelayDist::LogNormal { mu, sigma } => {
                finite("mu", mu)?;
                finite("sigma", sigma)?;
                if sigma < 0.0 {
                    return Err(ConfigError::invalid(field, "sigma must be non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Draws one delay in seconds. Consumes no randomness for `Fixed`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DelayDist::Fixed { value } => value,
            DelayDist::Uniform { min, max } => sample_uniform(rng, min, max),
            DelayDist::Exponential { mean } => Exp::new(1.0 / mean).expect("validated mean").sample(rng),
            DelayDist::LogNormal { mu, sigma } => LogNormal::new(mu, sigma).expect("validated sigma").sample(rng),
        }
    }
}

pub(crate) fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, min: f64, max: f64) -> f64 {
    if max > min {
        Uniform::new_inclusive(min, max).expect("ordered bounds").sample(rng)
    } else {
        min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipRange {
    pub min: f64,
    pub max: f64,
}

impl Default for ClipRange {
    fn default() -> Self {
        Self { min: CLIP_MIN_S, max: CLIP_MAX_S }
    }
}

/// Everything a simulation run depends on.
///
/// Only `clip_len_s` (default 5–10 s) and `smoothing_mode` (default
/// `replace`) may be omitted from a config file. `smoothing_mode` is not
/// consumed by the simulator; it is carried so a run's effective
/// configuration can be replayed through the post-processing tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub duration_s: f64,
    pub num_operators: u32,
    pub true_event_rate_per_hr: f64,
    pub false_alarm_rate_per_hr: f64,
    pub operator_label_accuracy: f64,
    pub retrain_batch_size: u64,
    pub retrain_fp_decay: f64,
    #[serde(default)]
    pub smoothing_mode: SmoothingMode,
    #[serde(default)]
    pub clip_len_s: ClipRange,
    pub notify_delay_s: DelayDist,
    pub operator_response_delay_s: DelayDist,
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: SimConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(ConfigError::invalid("duration_s", "must be finite and positive"));
        }
        if self.num_operators < 1 {
            return Err(ConfigError::invalid("num_operators", "need at least one operator"));
        }
        for (field, rate) in [
            ("true_event_rate_per_hr", self.true_event_rate_per_hr),
            ("false_alarm_rate_per_hr", self.false_alarm_rate_per_hr),
        ] {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(ConfigError::invalid(field, format!("rate must be non-negative, got {rate}")));
            }
        }
        let ClipRange { min, max } = self.clip_len_s;
        if !(CLIP_MIN_S..=CLIP_MAX_S).contains(&min) || !(CLIP_MIN_S..=CLIP_MAX_S).contains(&max) || min > max {
            return Err(ConfigError::invalid(
                "clip_len_s",
                format!("need {CLIP_MIN_S} <= min <= max <= {CLIP_MAX_S}, got [{min}, {max}]"),
            ));
        }
        self.notify_delay_s.validate("notify_delay_s")?;
        self.operator_response_delay_s.validate("operator_response_delay_s")?;
        if !(0.0..=1.0).contains(&self.operator_label_accuracy) {
            return Err(ConfigError::invalid("operator_label_accuracy", "must lie in [0, 1]"));
        }
        if self.retrain_batch_size < 1 {
            return Err(ConfigError::invalid("retrain_batch_size", "must be at least 1"));
        }
        if !(self.retrain_fp_decay > 0.0 && self.retrain_fp_decay <= 1.0) {
            return Err(ConfigError::invalid("retrain_fp_decay", "must lie in (0, 1]"));
        }
        Ok(())
    }
}
