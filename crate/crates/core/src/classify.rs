//! Heuristic labelling of finite resistance profiles.
//!
//! An infinite-volume resistance is finite or infinite; a finite profile can
//! only show whether the increments `R_{k+1} - R_k` shrink or stay bounded
//! below. The label is evidence for one behaviour, not a verdict.

use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthLabel {
    TransientLike,
    RecurrentLike,
    Inconclusive,
}

impl GrowthLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthLabel::TransientLike => "transient-like",
            GrowthLabel::RecurrentLike => "recurrent-like",
            GrowthLabel::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub window: usize,
    pub ratio_threshold: f64,
    /// Increments must stay above this fraction of the first increment.
    pub floor_fraction: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            window: 4,
            ratio_threshold: 0.9,
            floor_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: GrowthLabel,
    pub increments: Vec<f64>,
    /// Ratios `Δ_{i+1} / Δ_i` over the last window.
    pub ratios: Vec<f64>,
    pub mean_ratio: f64,
    pub min_increment: f64,
    pub floor: f64,
}

/// Tolerated decrease between consecutive values, relative to their size.
const DECREASE_SLACK: f64 = 1e-9;

pub fn classify_resistance_growth(series: &[(u32, f64)], cfg: &ClassifierConfig) -> Result<Classification> {
    if cfg.window < 1 {
        return Err(Error::invalid("classifier window must be positive"));
    }
    if series.len() < cfg.window + 2 {
        return Err(Error::invalid("series is shorter than window + 2"));
    }
    if series.iter().any(|&(_, r)| !r.is_finite()) {
        return Err(Error::invalid("series values must be finite"));
    }
    if series.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid("series shells must increase"));
    }
    let mut increments = Vec::with_capacity(series.len() - 1);
    for w in series.windows(2) {
        let d = w[1].1 - w[0].1;
        if d < -DECREASE_SLACK * w[0].1.abs().max(1.0) {
            return Err(Error::invalid("resistance series decreases"));
        }
        increments.push(d.max(0.0));
    }
    let tail = &increments[increments.len() - cfg.window - 1..];
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| match (w[0] == 0.0, w[1] == 0.0) {
            (true, true) => 0.0,
            (true, false) => f64::INFINITY,
            _ => w[1] / w[0],
        })
        .collect();
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let last = &increments[increments.len() - cfg.window..];
    let min_increment = last.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = cfg.floor_fraction * increments[0];
    let label = if mean_ratio < cfg.ratio_threshold {
        GrowthLabel::TransientLike
    } else if min_increment > floor {
        GrowthLabel::RecurrentLike
    } else {
        GrowthLabel::Inconclusive
    };
    Ok(Classification {
        label,
        increments,
        ratios,
        mean_ratio,
        min_increment,
        floor,
    })
}
