//! Components, per-ball clusters, annulus cutsets and diameters.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::Rng;

use crate::graph::{Edge, PercolationGraph};
use crate::hier::BallSpec;
use crate::model::{kappa_j, ScheduleProfile};
use crate::renorm::{DensityPopulation, PopulationSource};
use crate::rng::{substream, tag};
use crate::{Error, Result};

/// Disjoint sets with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = self.parent[x as usize];
        }
        x
    }

    /// Returns `true` if the two sets were distinct.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }

    /// Size of the set containing `x`.
    pub fn set_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
}

/// Component label per vertex. Labels are numbered in order of each
/// component's smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabeling {
    labels: Vec<u32>,
    sizes: Vec<u64>,
}

impl ClusterLabeling {
    fn from_union_find(uf: &mut UnionFind, n: usize) -> Self {
        let mut root_label = vec![u32::MAX; n];
        let mut labels = Vec::with_capacity(n);
        let mut sizes = Vec::new();
        for v in 0..n as u32 {
            let r = uf.find(v) as usize;
            if root_label[r] == u32::MAX {
                root_label[r] = sizes.len() as u32;
                sizes.push(0);
            }
            let l = root_label[r];
            sizes[l as usize] += 1;
            labels.push(l);
        }
        ClusterLabeling { labels, sizes }
    }

    pub fn label(&self, v: u64) -> u32 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Vertices of component `label`, increasing.
    pub fn members(&self, label: u32) -> Vec<u64> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(v, _)| v as u64)
            .collect()
    }
}

pub fn components(g: &PercolationGraph) -> ClusterLabeling {
    let n = g.vertex_count() as usize;
    let mut uf = UnionFind::new(n);
    for e in g.edges() {
        uf.union(e.u as u32, e.v as u32);
    }
    ClusterLabeling::from_union_find(&mut uf, n)
}

/// Vertices of the component containing the origin, increasing.
pub fn origin_cluster(g: &PercolationGraph) -> Vec<u64> {
    let mut c: Vec<u64> = g.adjacency().reachable(0).into_iter().map(u64::from).collect();
    c.sort_unstable();
    c
}

/// The attached cluster of a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallClusterRecord {
    pub ball: BallSpec,
    pub vertices: Vec<u64>,
    pub density: f64,
    /// Some level of the construction had several heaviest groups and one
    /// was drawn uniformly.
    pub tie_broken: bool,
}

/// Vertices kept by the construction (local ids), cluster sizes of the
/// top-level balls, and whether any tie was broken.
struct Attached {
    active: Vec<bool>,
    mass: Vec<u64>,
    tie: bool,
}

/// Attached clusters of all `levels`-balls in `[start, start + n)`, built
/// bottom up. At level `k` the clusters of the `N` sub-balls of a `k`-ball
/// are joined by direct edges of length `k` between them; the heaviest group
/// (by vertex count, ties drawn uniformly) becomes the ball's cluster and
/// every other vertex is dropped together with its edges.
fn attached_clusters(g: &PercolationGraph, start: u64, n: usize, levels: u32, seed: u64) -> Attached {
    let hier = g.hierarchy();
    let order = g.order() as usize;
    let end = start + n as u64;
    let mut by_dist: Vec<Vec<(u32, u32)>> = vec![Vec::new(); levels as usize + 1];
    for e in g.edges_from(start, end) {
        if e.v < end && e.dist <= levels {
            by_dist[e.dist as usize].push(((e.u - start) as u32, (e.v - start) as u32));
        }
    }
    let mut active = vec![true; n];
    let mut mass = vec![1u64; n];
    let mut tie = false;
    let mut acc = vec![0u64; n];
    for k in 1..=levels {
        let width = hier.pow(k - 1) as usize;
        let children = n / width;
        let mut uf = UnionFind::new(children);
        for &(u, v) in &by_dist[k as usize] {
            if active[u as usize] && active[v as usize] {
                uf.union(u / width as u32, v / width as u32);
            }
        }
        let base = start / hier.pow(k);
        let mut keep = vec![false; children];
        let mut next = Vec::with_capacity(children / order);
        for b in 0..children / order {
            let kids = b * order..(b + 1) * order;
            for c in kids.clone() {
                acc[c] = 0;
            }
            for c in kids.clone() {
                let r = uf.find(c as u32) as usize;
                acc[r] += mass[c];
            }
            let best = kids.clone().map(|c| acc[c]).max().unwrap_or(0);
            let roots: Vec<usize> = kids
                .clone()
                .filter(|&c| uf.find(c as u32) as usize == c && acc[c] == best)
                .collect();
            let chosen = if roots.len() > 1 {
                tie = true;
                let mut rng = substream(seed, &[tag::TIE, k as u64, base + b as u64]);
                roots[rng.random_range(0..roots.len())]
            } else {
                roots[0]
            };
            for c in kids {
                keep[c] = uf.find(c as u32) as usize == chosen;
            }
            next.push(best);
        }
        for (v, a) in active.iter_mut().enumerate() {
            *a = *a && keep[v / width];
        }
        mass = next;
    }
    Attached { active, mass, tie }
}

/// Cluster of `ball`, using only edges inside it. Ties are drawn from
/// streams keyed by `seed`, level and ball index, so a ball's cluster agrees
/// with the one [`density_population`] uses when `seed` is the graph's seed.
pub fn ball_cluster(g: &PercolationGraph, ball: &BallSpec, seed: u64) -> Result<BallClusterRecord> {
    let c = ball.center();
    if c.order() != g.order() || c.level() != g.depth() {
        return Err(Error::invalid("ball does not belong to the sampled hierarchy"));
    }
    let range = ball.range();
    let a = attached_clusters(g, range.start, ball.size() as usize, ball.diameter(), seed);
    let vertices: Vec<u64> = (0..a.active.len())
        .filter(|&v| a.active[v])
        .map(|v| range.start + v as u64)
        .collect();
    Ok(BallClusterRecord {
        ball: *ball,
        density: vertices.len() as f64 / ball.size() as f64,
        vertices,
        tie_broken: a.tie,
    })
}

/// Cluster densities of all disjoint `level`-balls of the sample, in ball
/// order. Ties are drawn with the graph's seed.
pub fn density_population(g: &PercolationGraph, level: u32) -> Result<DensityPopulation> {
    if level > g.depth() {
        return Err(Error::invalid("density level exceeds the sampled depth"));
    }
    let width = g.hierarchy().pow(level) as f64;
    let a = attached_clusters(g, 0, g.vertex_count() as usize, level, g.seed());
    let samples = a.mass.iter().map(|&m| m as f64 / width).collect();
    Ok(DensityPopulation {
        level,
        samples,
        seed: g.seed(),
        source: PopulationSource::DirectSimulation,
    })
}

/// One cutset `Π_j` between `I_j = (k_{2j}, k_{2j+2}]` and
/// `I_{j+1} = (k_{2j+2}, k_{2j+4}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutsetRow {
    pub j: u32,
    pub inner: (u64, u64),
    pub outer: (u64, u64),
    pub edges: Vec<Edge>,
    pub kappa_over_n: f64,
    /// The outer annulus reaches beyond the sampled depth.
    pub truncated: bool,
    /// Removing the cutset disconnects the origin from every cluster vertex
    /// outside `B_{k_{2j+2}}(0)`.
    pub separating: bool,
    /// The cluster has vertices outside `B_{k_{2j+2}}(0)`.
    pub populated_beyond: bool,
}

impl CutsetRow {
    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutsetReport {
    pub rows: Vec<CutsetRow>,
}

/// Cutsets of the cluster (a component containing the origin, increasing)
/// along the schedule's annuli. `κ_j` uses the schedule's `a` and the graph's
/// `α`.
pub fn cutsets(
    g: &PercolationGraph,
    sched: &ScheduleProfile,
    cluster: &[u64],
    j_range: RangeInclusive<u32>,
) -> Result<CutsetReport> {
    sched.validate()?;
    if cluster.binary_search(&0).is_err() {
        return Err(Error::invalid("cluster must contain the origin"));
    }
    let hier = g.hierarchy();
    let depth = g.depth() as u64;
    let alpha = g.profile().alpha;
    let n = g.order() as f64;
    let in_cluster = |v: u64| cluster.binary_search(&v).is_ok();
    let max_radius = cluster.iter().map(|&v| hier.radius(v)).max().unwrap_or(0) as u64;
    let mut rows = Vec::new();
    for j in j_range {
        let j64 = j as u64;
        let k_lo = sched.k_n(2 * j64);
        let k_mid = sched.k_n(2 * j64 + 2);
        let k_hi = sched.k_n(2 * j64 + 4);
        let in_annulus = |r: u64, lo: u64, hi: u64| r > lo && r <= hi;
        let edges: Vec<Edge> = g
            .edges()
            .iter()
            .filter(|e| {
                let (ru, rv) = (hier.radius(e.u) as u64, hier.radius(e.v) as u64);
                (in_annulus(ru, k_lo, k_mid) && in_cluster(e.u) && in_annulus(rv, k_mid, k_hi))
                    || (in_annulus(rv, k_lo, k_mid) && in_cluster(e.v) && in_annulus(ru, k_mid, k_hi))
            })
            .copied()
            .collect();
        let populated_beyond = max_radius > k_mid;
        let separating = !populated_beyond || separates(g, &edges, k_mid);
        rows.push(CutsetRow {
            j,
            inner: (k_lo, k_mid),
            outer: (k_mid, k_hi),
            kappa_over_n: kappa_j(sched.a, alpha, j) / n,
            truncated: k_hi > depth,
            separating,
            populated_beyond,
            edges,
        });
    }
    Ok(CutsetReport { rows })
}

/// Whether deleting `removed` (sorted) leaves the origin without a path to a
/// vertex of radius greater than `radius`.
fn separates(g: &PercolationGraph, removed: &[Edge], radius: u64) -> bool {
    let hier = g.hierarchy();
    let n = g.vertex_count() as usize;
    let mut uf = UnionFind::new(n);
    for e in g.edges() {
        if removed.binary_search(e).is_err() {
            uf.union(e.u as u32, e.v as u32);
        }
    }
    let origin = uf.find(0);
    (0..n as u32).all(|v| hier.radius(v as u64) as u64 <= radius || uf.find(v) != origin)
}

/// An edge jumping over at least two annuli of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkipViolation {
    pub edge: Edge,
    /// Annulus `(k_{n-1}, k_n]` of the inner endpoint.
    pub n: u64,
    /// The outer endpoint lies in `(k_{n+m}, k_{n+m+1}]`.
    pub m: u64,
}

/// Index `n` of the annulus `(k_{n-1}, k_n]` containing each radius
/// `0..=depth`; the origin gets index 1.
fn annulus_indices(sched: &ScheduleProfile, depth: u32) -> Vec<u64> {
    let mut idx = Vec::with_capacity(depth as usize + 1);
    let mut n = 1u64;
    for r in 0..=depth as u64 {
        while sched.k_n(n) < r {
            n += 1;
        }
        idx.push(n);
    }
    idx
}

pub fn detect_skipping(g: &PercolationGraph, sched: &ScheduleProfile) -> Result<Vec<SkipViolation>> {
    sched.validate()?;
    let hier = g.hierarchy();
    let idx = annulus_indices(sched, g.depth());
    Ok(g.edges()
        .iter()
        .filter_map(|e| {
            let a = idx[hier.radius(e.u) as usize];
            let b = idx[hier.radius(e.v) as usize];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            (hi - lo >= 3).then_some(SkipViolation {
                edge: *e,
                n: lo,
                m: hi - lo - 1,
            })
        })
        .collect())
}

/// Above this many vertices, [`cluster_diameter`] uses the double sweep.
pub const EXACT_DIAMETER_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMethod {
    /// Breadth-first search from every vertex.
    Exact,
    /// Eccentricity of the far end of a BFS from an arbitrary vertex; at
    /// least half the true diameter.
    DoubleSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiameterEstimate {
    pub value: u64,
    pub method: DiameterMethod,
}

/// Graph diameter of the subgraph induced on `vertices`.
pub fn cluster_diameter(g: &PercolationGraph, vertices: &[u64]) -> Result<DiameterEstimate> {
    cluster_diameter_with_limit(g, vertices, EXACT_DIAMETER_LIMIT)
}

pub fn cluster_diameter_with_limit(
    g: &PercolationGraph,
    vertices: &[u64],
    exact_limit: usize,
) -> Result<DiameterEstimate> {
    if vertices.is_empty() {
        return Err(Error::invalid("diameter of an empty vertex set"));
    }
    let mut set = vertices.to_vec();
    set.sort_unstable();
    set.dedup();
    if *set.last().unwrap() >= g.vertex_count() {
        return Err(Error::invalid("vertex outside the sampled ball"));
    }
    let local: Vec<Vec<u32>> = set
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|&w| set.binary_search(&(w as u64)).ok().map(|i| i as u32))
                .collect()
        })
        .collect();
    let (first, far) = bfs_ecc(&local, 0);
    if first.contains(&u32::MAX) {
        return Err(Error::invalid("vertex set is not connected"));
    }
    if set.len() <= exact_limit {
        let mut best = 0;
        for s in 0..set.len() as u32 {
            best = best.max(bfs_ecc(&local, s).1 .1);
        }
        Ok(DiameterEstimate {
            value: best as u64,
            method: DiameterMethod::Exact,
        })
    } else {
        let (_, (_, ecc)) = bfs_ecc(&local, far.0);
        Ok(DiameterEstimate {
            value: ecc as u64,
            method: DiameterMethod::DoubleSweep,
        })
    }
}

/// Distances from `s` and the farthest vertex with its distance.
fn bfs_ecc(adj: &[Vec<u32>], s: u32) -> (Vec<u32>, (u32, u32)) {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[s as usize] = 0;
    let mut queue = VecDeque::from([s]);
    let mut far = (s, 0);
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize];
        if d > far.1 {
            far = (x, d);
        }
        for &y in &adj[x as usize] {
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = d + 1;
                queue.push_back(y);
            }
        }
    }
    (dist, far)
}
