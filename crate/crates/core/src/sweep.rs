//! Coupled sweeps over the polynomial exponent `α`.
//!
//! The graph for the largest `α` is sampled once and every smaller `α` is
//! obtained by thinning the previous graph, so the family is nested and, by
//! Rayleigh monotonicity, resistances can only decrease as `α` grows.

use alloc::vec::Vec;

use crate::classify::{classify_resistance_growth, ClassifierConfig, GrowthLabel};
use crate::cluster::{cutsets, origin_cluster};
use crate::electrical::{nash_williams_bound, resistance_profile, MONOTONE_SLACK};
use crate::graph::{PercolationGraph, SampleConfig};
use crate::model::ScheduleProfile;
use crate::rng::{derive_seed, tag};
use crate::sampler::{sample_graph, thin_graph};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Profile and depth shared by all members; its `α` is ignored.
    pub base: SampleConfig,
    /// Ascending.
    pub alphas: Vec<f64>,
    pub shells: Vec<u32>,
    pub schedule: ScheduleProfile,
    pub j_min: u32,
    pub tol: f64,
    pub classifier: ClassifierConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub k: u32,
    /// `+∞` when the origin's cluster does not reach beyond `B_k(0)`.
    pub resistance: f64,
    /// Nash-Williams sum over separating cutsets lying inside `B_k(0)`.
    pub nw_partial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub labels: Vec<(f64, GrowthLabel)>,
    /// Resistance is nonincreasing in `α` at every shell.
    pub monotone: bool,
    pub graphs: Vec<PercolationGraph>,
}

/// Samples the coupled family for `cfg.alphas` with one shared seed.
pub fn coupled_family(base: &SampleConfig, alphas: &[f64], seed: u64) -> Result<Vec<PercolationGraph>> {
    if alphas.is_empty() {
        return Err(Error::invalid("alpha sweep needs at least one exponent"));
    }
    if alphas.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("alphas must be sorted ascending"));
    }
    let top = alphas.len() - 1;
    let top_cfg = SampleConfig {
        profile: base.profile.with_alpha(alphas[top])?,
        seed,
        ..*base
    };
    let mut family = Vec::with_capacity(alphas.len());
    family.push(sample_graph(&top_cfg)?);
    for i in (0..top).rev() {
        let target = base.profile.with_alpha(alphas[i])?;
        let prev = family.last().unwrap();
        family.push(thin_graph(prev, &target, derive_seed(seed, &[tag::THIN, i as u64]))?);
    }
    family.reverse();
    Ok(family)
}

pub fn alpha_sweep(cfg: &SweepConfig, seed: u64) -> Result<SweepReport> {
    let graphs = coupled_family(&cfg.base, &cfg.alphas, seed)?;
    let mut shells = cfg.shells.clone();
    shells.sort_unstable();
    shells.dedup();
    let depth = cfg.base.depth as u64;
    let j_max = (cfg.j_min..)
        .take_while(|&j| cfg.schedule.k_n(2 * j as u64 + 2) <= depth)
        .last();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (g, &alpha) in graphs.iter().zip(&cfg.alphas) {
        let resist = if g.degree(0) == 0 {
            None
        } else {
            Some(resistance_profile(g, &shells, cfg.tol)?)
        };
        let nw = match j_max {
            Some(j_max) => {
                let cluster = origin_cluster(g);
                let report = cutsets(g, &cfg.schedule, &cluster, cfg.j_min..=j_max)?;
                let bound = nash_williams_bound(&report)?;
                bound
                    .partial_sums
                    .iter()
                    .map(|&(j, _, s)| (cfg.schedule.k_n(2 * j as u64 + 2), s))
                    .collect()
            }
            None => Vec::new(),
        };
        for &k in &shells {
            let resistance = resist
                .as_ref()
                .and_then(|p| p.entries.iter().find(|e| e.k == k))
                .map_or(f64::INFINITY, |e| e.estimate.value);
            let nw_partial = nw
                .iter()
                .filter(|&&(outer, _)| outer <= k as u64)
                .map(|&(_, s)| s)
                .next_back()
                .unwrap_or(0.0);
            rows.push(SweepRow {
                alpha,
                k,
                resistance,
                nw_partial,
            });
        }
        let series = resist.map(|p| p.series()).unwrap_or_default();
        let label = classify_resistance_growth(&series, &cfg.classifier)
            .map(|c| c.label)
            .unwrap_or(GrowthLabel::Inconclusive);
        labels.push((alpha, label));
    }
    let per_alpha = shells.len();
    let monotone = (1..cfg.alphas.len()).all(|i| {
        (0..per_alpha).all(|s| {
            let lo = rows[(i - 1) * per_alpha + s].resistance;
            let hi = rows[i * per_alpha + s].resistance;
            lo >= hi * (1.0 - MONOTONE_SLACK)
        })
    });
    Ok(SweepReport {
        rows,
        labels,
        monotone,
        graphs,
    })
}
