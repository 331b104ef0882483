//! Exact sampling of the percolation graph on `B_depth(0)` and monotone
//! thinning between profiles.
//!
//! For every shell `j` the number of distance-`j` edges is drawn from
//! `Binomial(m_j, p_j)` and that many distinct pairs are then placed uniformly
//! among the `m_j` candidates. This is the same law as independent Bernoulli
//! trials per pair but costs time proportional to the number of edges.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::graph::{Edge, PercolationGraph, SampleConfig};
use crate::hier::{shell_pair_count, Hierarchy};
use crate::model::{edge_prob, ConnectivityProfile};
use crate::rng::{substream, tag, StreamRng};
use crate::{Error, Result};

/// Largest number of edges a single sample may hold.
pub const MAX_EDGES: u64 = 1 << 28;

pub fn sample_graph(cfg: &SampleConfig) -> Result<PercolationGraph> {
    let hier = cfg.validate()?;
    let mut edges = Vec::new();
    for j in 1..=cfg.depth {
        let p = edge_prob(&cfg.profile, j)?;
        let mut rng = substream(cfg.seed, &[tag::SHELL, j as u64]);
        sample_shell(&hier, j, p, &mut rng, &mut edges)?;
        if edges.len() as u64 > MAX_EDGES {
            return Err(Error::Capacity {
                requested: edges.len() as u128,
                limit: MAX_EDGES as u128,
            });
        }
    }
    edges.sort_unstable();
    Ok(PercolationGraph::from_sorted_unchecked(hier, *cfg, edges))
}

fn sample_shell(
    hier: &Hierarchy,
    j: u32,
    p: f64,
    rng: &mut StreamRng,
    out: &mut Vec<Edge>,
) -> Result<()> {
    let m = shell_pair_count(hier.order(), hier.level(), j)?;
    let count = if p >= 1.0 {
        m
    } else if p <= 0.0 {
        0
    } else {
        Binomial::new(m, p)
            .map_err(|_| Error::invalid("binomial parameters out of range"))?
            .sample(rng)
    };
    if count == 0 {
        return Ok(());
    }
    if count > MAX_EDGES {
        return Err(Error::Capacity {
            requested: count as u128,
            limit: MAX_EDGES as u128,
        });
    }
    if 2 * count > m {
        // Dense shell: choose the missing pairs instead and enumerate the rest.
        let missing = distinct_pairs(hier, j, m - count, rng);
        let start = out.len();
        enumerate_shell(hier, j, out);
        let shell = &mut out[start..];
        shell.sort_unstable();
        let mut keep = 0;
        let mut mi = 0;
        for i in 0..shell.len() {
            let e = shell[i];
            while mi < missing.len() && missing[mi] < (e.u, e.v) {
                mi += 1;
            }
            if mi < missing.len() && missing[mi] == (e.u, e.v) {
                continue;
            }
            shell[keep] = e;
            keep += 1;
        }
        out.truncate(start + keep);
    } else {
        let pairs = distinct_pairs(hier, j, count, rng);
        out.extend(pairs.into_iter().map(|(u, v)| Edge { u, v, dist: j }));
    }
    Ok(())
}

/// `count` distinct uniformly random distance-`j` pairs, sorted.
fn distinct_pairs(hier: &Hierarchy, j: u32, count: u64, rng: &mut StreamRng) -> Vec<(u64, u64)> {
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(count as usize);
    while (pairs.len() as u64) < count {
        let deficit = count - pairs.len() as u64;
        for _ in 0..deficit {
            pairs.push(random_pair(hier, j, rng));
        }
        pairs.sort_unstable();
        pairs.dedup();
    }
    pairs
}

/// A uniformly random unordered pair at distance exactly `j`: take `x`
/// uniform, give it a different digit `j` and fresh uniform lower digits.
fn random_pair(hier: &Hierarchy, j: u32, rng: &mut StreamRng) -> (u64, u64) {
    let n = hier.order() as u64;
    let x = rng.random_range(0..hier.size());
    let low = hier.pow(j - 1);
    let block = low * n;
    let digit = (x / low) % n;
    let mut other = rng.random_range(0..n - 1);
    if other >= digit {
        other += 1;
    }
    let y = (x / block) * block + other * low + rng.random_range(0..low);
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

fn enumerate_shell(hier: &Hierarchy, j: u32, out: &mut Vec<Edge>) {
    let n = hier.order() as u64;
    let low = hier.pow(j - 1);
    let block = low * n;
    let mut base = 0;
    while base < hier.size() {
        for a in 0..n {
            for b in a + 1..n {
                for x in 0..low {
                    for y in 0..low {
                        out.push(Edge {
                            u: base + a * low + x,
                            v: base + b * low + y,
                            dist: j,
                        });
                    }
                }
            }
        }
        base += block;
    }
}

/// Keeps each distance-`j` edge of `g` independently with probability
/// `p_target(j) / p_source(j)`, so the result is a sample of `target` that is
/// contained in `g`. The returned graph records `target` and `seed` as its
/// provenance.
pub fn thin_graph(g: &PercolationGraph, target: &ConnectivityProfile, seed: u64) -> Result<PercolationGraph> {
    target.validate()?;
    let source = g.profile();
    if target.order != source.order {
        return Err(Error::invalid("thinning target must have the same order N"));
    }
    let depth = g.depth();
    let mut ratios = Vec::with_capacity(depth as usize + 1);
    ratios.push(0.0);
    for j in 1..=depth {
        let ps = edge_prob(source, j)?;
        let pt = edge_prob(target, j)?;
        if pt > ps {
            return Err(Error::CouplingOrder {
                shell: j,
                source: ps,
                target: pt,
            });
        }
        ratios.push(if ps > 0.0 { pt / ps } else { 0.0 });
    }
    let mut rngs: Vec<StreamRng> = (0..=depth)
        .map(|j| substream(seed, &[tag::THIN, j as u64]))
        .collect();
    let kept = g
        .edges()
        .iter()
        .filter(|e| {
            let r = ratios[e.dist as usize];
            let u: f64 = rngs[e.dist as usize].random();
            u < r
        })
        .copied()
        .collect();
    let provenance = SampleConfig {
        profile: *target,
        seed,
        ..*g.provenance()
    };
    Ok(PercolationGraph::from_sorted_unchecked(*g.hierarchy(), provenance, kept))
}
