//! Simple random walks on clusters.

use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{Adjacency, PercolationGraph};
use crate::rng::{substream, tag, StreamRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub start: u32,
    pub max_steps: u64,
    pub replicas: u64,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(replicas: u64, max_steps: u64, seed: u64) -> Self {
        WalkConfig {
            start: 0,
            max_steps,
            replicas,
            seed,
        }
    }
}

/// One step to a uniformly chosen neighbour of `v` (which must have one).
#[inline]
pub fn step(adj: &Adjacency, v: u32, rng: &mut StreamRng) -> u32 {
    let nb = adj.neighbors(v);
    nb[rng.random_range(0..nb.len())]
}

fn replica_rng(cfg: &WalkConfig, r: u64) -> StreamRng {
    substream(cfg.seed, &[tag::WALK, r])
}

fn check_start(adj: &Adjacency, cfg: &WalkConfig) -> Result<()> {
    if cfg.start as usize >= adj.vertex_count() {
        return Err(Error::invalid("walk start outside the graph"));
    }
    if adj.degree(cfg.start) == 0 {
        return Err(Error::invalid("walk start has no neighbours"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeEstimate {
    /// `escaped / (escaped + returned)`; censored walks are excluded.
    pub estimate: f64,
    pub std_error: f64,
    pub escaped: u64,
    pub returned: u64,
    /// Walks stopped by the step cap before either event.
    pub censored: u64,
}

/// Estimates the probability that a walk from `cfg.start` hits the target
/// set before returning to the start.
pub fn escape_probability(
    adj: &Adjacency,
    cfg: &WalkConfig,
    is_target: impl Fn(u32) -> bool,
) -> Result<EscapeEstimate> {
    check_start(adj, cfg)?;
    if is_target(cfg.start) {
        return Err(Error::invalid("walk start lies in the target set"));
    }
    if !adj.reachable(cfg.start).into_iter().any(&is_target) {
        return Err(Error::invalid("the start's cluster does not reach the target"));
    }
    let (mut escaped, mut returned, mut censored) = (0, 0, 0);
    for r in 0..cfg.replicas {
        let mut rng = replica_rng(cfg, r);
        let mut v = cfg.start;
        let mut steps = 0;
        loop {
            if steps == cfg.max_steps {
                censored += 1;
                break;
            }
            v = step(adj, v, &mut rng);
            steps += 1;
            if is_target(v) {
                escaped += 1;
                break;
            }
            if v == cfg.start {
                returned += 1;
                break;
            }
        }
    }
    let done = escaped + returned;
    let (estimate, std_error) = if done == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let p = escaped as f64 / done as f64;
        (p, libm::sqrt(p * (1.0 - p) / done as f64))
    };
    Ok(EscapeEstimate {
        estimate,
        std_error,
        escaped,
        returned,
        censored,
    })
}

/// Escape from the origin to the cluster vertices outside `B_k(0)`.
pub fn escape_probability_shell(g: &PercolationGraph, cfg: &WalkConfig, k: u32) -> Result<EscapeEstimate> {
    if k >= g.depth() {
        return Err(Error::invalid("shell must lie inside the sampled ball"));
    }
    let edge = g.hierarchy().pow(k);
    escape_probability(g.adjacency(), cfg, |v| v as u64 >= edge)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkOutcome {
    Escape,
    ReturnExhausted,
}

impl WalkOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            WalkOutcome::Escape => "escape",
            WalkOutcome::ReturnExhausted => "return-exhausted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReturnRow {
    pub replica: u64,
    pub outcome: WalkOutcome,
    pub steps: u64,
    pub returns: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnReport {
    pub rows: Vec<ReturnRow>,
    pub mean_returns: f64,
    pub median_returns: f64,
}

/// Counts returns to the start before the walk reaches the exit set or runs
/// out of steps.
pub fn return_statistics(
    adj: &Adjacency,
    cfg: &WalkConfig,
    is_exit: impl Fn(u32) -> bool,
) -> Result<ReturnReport> {
    check_start(adj, cfg)?;
    let mut rows = Vec::with_capacity(cfg.replicas as usize);
    for r in 0..cfg.replicas {
        let mut rng = replica_rng(cfg, r);
        let mut v = cfg.start;
        let (mut steps, mut returns) = (0, 0);
        let mut outcome = WalkOutcome::ReturnExhausted;
        while steps < cfg.max_steps {
            v = step(adj, v, &mut rng);
            steps += 1;
            if is_exit(v) {
                outcome = WalkOutcome::Escape;
                break;
            }
            if v == cfg.start {
                returns += 1;
            }
        }
        rows.push(ReturnRow {
            replica: r,
            outcome,
            steps,
            returns,
        });
    }
    let mut counts: Vec<u64> = rows.iter().map(|r| r.returns).collect();
    counts.sort_unstable();
    let n = counts.len();
    let mean_returns = counts.iter().sum::<u64>() as f64 / n.max(1) as f64;
    let median_returns = match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => counts[n / 2] as f64,
        _ => (counts[n / 2 - 1] + counts[n / 2]) as f64 / 2.0,
    };
    Ok(ReturnReport {
        rows,
        mean_returns,
        median_returns,
    })
}

/// Returns before leaving `B_k(0)`, starting from the origin by default.
pub fn return_statistics_shell(g: &PercolationGraph, cfg: &WalkConfig, k: u32) -> Result<ReturnReport> {
    let edge = if k >= g.depth() {
        u64::MAX
    } else {
        g.hierarchy().pow(k)
    };
    return_statistics(g.adjacency(), cfg, |v| v as u64 >= edge)
}
