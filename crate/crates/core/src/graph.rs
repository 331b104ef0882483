//! Sampled percolation graphs and their adjacency index.

use alloc::vec;
use alloc::vec::Vec;

use crate::hier::Hierarchy;
use crate::model::ConnectivityProfile;
use crate::{Error, Result};

/// Default cap on `N^depth`.
pub const DEFAULT_VERTEX_BUDGET: u64 = 1 << 24;
/// Vertex ids are stored as `u32` in adjacency lists.
pub const MAX_VERTICES: u64 = 1 << 32;

/// An unordered edge `u < v` with its hierarchical length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: u64,
    pub v: u64,
    pub dist: u32,
}

/// Everything needed to reproduce a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub depth: u32,
    pub profile: ConnectivityProfile,
    pub seed: u64,
    pub vertex_budget: u64,
}

impl SampleConfig {
    pub fn new(depth: u32, profile: ConnectivityProfile, seed: u64) -> Self {
        SampleConfig {
            depth,
            profile,
            seed,
            vertex_budget: DEFAULT_VERTEX_BUDGET,
        }
    }

    pub fn order(&self) -> u32 {
        self.profile.order
    }

    /// Checks the profile and the vertex budget; returns the sampled ball.
    pub fn validate(&self) -> Result<Hierarchy> {
        self.profile.validate()?;
        let limit = self.vertex_budget.min(MAX_VERTICES);
        let requested = (self.profile.order as u128).saturating_pow(self.depth);
        if requested > limit as u128 {
            return Err(Error::Capacity {
                requested,
                limit: limit as u128,
            });
        }
        Hierarchy::new(self.profile.order, self.depth)
    }
}

/// Compressed neighbour lists over vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    /// Builds the index of an undirected simple graph; each pair is listed once.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (u32, u32)> + Clone) -> Self {
        let mut degree = vec![0usize; n];
        for (a, b) in pairs.clone() {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for (a, b) in pairs {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Adjacency { offsets, targets }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Vertices reachable from `start`, in breadth-first order.
    pub fn reachable(&self, start: u32) -> Vec<u32> {
        let mut seen = vec![false; self.vertex_count()];
        let mut order = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &y in self.neighbors(x) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    order.push(y);
                }
            }
        }
        order
    }
}

/// Edge set of one sample on `B_depth(0)`, sorted by `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PercolationGraph {
    hier: Hierarchy,
    edges: Vec<Edge>,
    adjacency: Adjacency,
    provenance: SampleConfig,
}

impl PercolationGraph {
    /// Validates and indexes an edge list: endpoints inside the ball, `u < v`,
    /// correct distance annotations, no duplicates.
    pub fn from_edges(provenance: SampleConfig, mut edges: Vec<Edge>) -> Result<Self> {
        let mut hier = provenance.validate();
        if let Err(Error::Capacity { .. }) = hier {
            // Loading a stored graph should not depend on the caller's budget.
            let relaxed = SampleConfig {
                vertex_budget: MAX_VERTICES,
                ..provenance
            };
            hier = relaxed.validate();
        }
        let hier = hier?;
        for e in &edges {
            if e.u >= e.v {
                return Err(Error::invalid("edges must satisfy u < v"));
            }
            if e.v >= hier.size() {
                return Err(Error::invalid("edge endpoint outside the sampled ball"));
            }
            if hier.dist(e.u, e.v) != e.dist {
                return Err(Error::invalid("edge distance does not match its endpoints"));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0].u == w[1].u && w[0].v == w[1].v) {
            return Err(Error::invalid("duplicate edge"));
        }
        Ok(Self::from_sorted_unchecked(hier, provenance, edges))
    }

    pub(crate) fn from_sorted_unchecked(
        hier: Hierarchy,
        provenance: SampleConfig,
        edges: Vec<Edge>,
    ) -> Self {
        let n = hier.size() as usize;
        let adjacency = Adjacency::from_pairs(n, edges.iter().map(|e| (e.u as u32, e.v as u32)));
        PercolationGraph {
            hier,
            edges,
            adjacency,
            provenance,
        }
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hier
    }

    pub fn order(&self) -> u32 {
        self.hier.order()
    }

    pub fn depth(&self) -> u32 {
        self.hier.level()
    }

    pub fn vertex_count(&self) -> u64 {
        self.hier.size()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn provenance(&self) -> &SampleConfig {
        &self.provenance
    }

    pub fn profile(&self) -> &ConnectivityProfile {
        &self.provenance.profile
    }

    pub fn seed(&self) -> u64 {
        self.provenance.seed
    }

    pub fn neighbors(&self, v: u64) -> &[u32] {
        self.adjacency.neighbors(v as u32)
    }

    pub fn degree(&self, v: u64) -> usize {
        self.adjacency.degree(v as u32)
    }

    pub fn contains_edge(&self, u: u64, v: u64) -> bool {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&(u, v)))
            .is_ok()
    }

    /// Edge counts indexed by distance (`counts[0]` is always 0).
    pub fn shell_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.depth() as usize + 1];
        for e in &self.edges {
            counts[e.dist as usize] += 1;
        }
        counts
    }

    /// Edges with `u` in the id range `[start, end)`.
    pub(crate) fn edges_from(&self, start: u64, end: u64) -> &[Edge] {
        let lo = self.edges.partition_point(|e| e.u < start);
        let hi = self.edges.partition_point(|e| e.u < end);
        &self.edges[lo..hi]
    }
}
