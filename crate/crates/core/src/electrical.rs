//! Effective resistance on unit-resistor networks.
//!
//! The sink set is grounded (potential 0) and a unit current is injected at
//! the source. The unknowns are the potentials of the non-sink vertices
//! reachable from the source without passing through the sink; the system is
//! the grounded graph Laplacian, which is symmetric positive definite as soon
//! as one sink vertex is adjacent to that piece.

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::CutsetReport;
use crate::graph::{Adjacency, PercolationGraph};
use crate::{Error, Result};

/// Default relative residual for the iterative solver.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Largest system solved by [`effective_resistance_dense`].
pub const DENSE_LIMIT: usize = 512;

/// Grounded Laplacian of the source's piece of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceProblem {
    /// Original id of every unknown; the source is unknown 0.
    vertices: Vec<u32>,
    /// Degree in the full network, sink neighbours included.
    degree: Vec<f64>,
    /// Neighbours among the unknowns.
    local: Adjacency,
    /// Number of edges from each unknown into the sink.
    sink_edges: Vec<u32>,
}

impl ResistanceProblem {
    pub fn new(adj: &Adjacency, source: u32, is_sink: impl Fn(u32) -> bool) -> Result<Self> {
        let n = adj.vertex_count();
        if source as usize >= n {
            return Err(Error::invalid("source outside the network"));
        }
        if is_sink(source) {
            return Err(Error::invalid("source belongs to the sink set"));
        }
        let mut index = vec![u32::MAX; n];
        let mut vertices = vec![source];
        index[source as usize] = 0;
        let mut head = 0;
        let mut touches_sink = false;
        while head < vertices.len() {
            let x = vertices[head];
            head += 1;
            for &y in adj.neighbors(x) {
                if is_sink(y) {
                    touches_sink = true;
                } else if index[y as usize] == u32::MAX {
                    index[y as usize] = vertices.len() as u32;
                    vertices.push(y);
                }
            }
        }
        if !touches_sink {
            return Err(Error::invalid("source and sink are not connected"));
        }
        let mut degree = Vec::with_capacity(vertices.len());
        let mut sink_edges = Vec::with_capacity(vertices.len());
        let mut pairs = Vec::new();
        for (i, &x) in vertices.iter().enumerate() {
            degree.push(adj.degree(x) as f64);
            let mut s = 0;
            for &y in adj.neighbors(x) {
                let j = index[y as usize];
                if j == u32::MAX {
                    s += 1;
                } else if (i as u32) < j {
                    pairs.push((i as u32, j));
                }
            }
            sink_edges.push(s);
        }
        let local = Adjacency::from_pairs(vertices.len(), pairs.iter().copied());
        Ok(ResistanceProblem {
            vertices,
            degree,
            local,
            sink_edges,
        })
    }

    /// Network given by an explicit edge list on vertices `0..n`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)], source: u32, sinks: &[u32]) -> Result<Self> {
        if edges.iter().any(|&(a, b)| a == b || a as usize >= n || b as usize >= n) {
            return Err(Error::invalid("edges must join distinct vertices of the network"));
        }
        let mut canon: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        canon.sort_unstable();
        canon.dedup();
        let adj = Adjacency::from_pairs(n, canon.iter().copied());
        Self::new(&adj, source, |v| sinks.contains(&v))
    }

    pub fn unknowns(&self) -> usize {
        self.vertices.len()
    }

    /// Original ids of the unknowns; the source comes first.
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Degree of the source in the network.
    pub fn source_degree(&self) -> f64 {
        self.degree[0]
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut s = self.degree[i] * x[i];
            for &j in self.local.neighbors(i as u32) {
                s -= x[j as usize];
            }
            out[i] = s;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactDense,
    Iterative,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactDense => "exact-dense",
            Method::Iterative => "iterative",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResistanceEstimate {
    pub value: f64,
    pub method: Method,
    /// Relative residual for solves, standard error for Monte Carlo.
    pub residual: f64,
    pub iterations: usize,
}

/// `max(ceil(20 sqrt(n)), 50)`.
pub fn iteration_cap(n: usize) -> usize {
    (libm::ceil(20.0 * libm::sqrt(n as f64)) as usize).max(50)
}

/// Potentials of the unknowns by Jacobi-preconditioned conjugate gradients.
pub fn solve_potentials(p: &ResistanceProblem, tol: f64) -> Result<(Vec<f64>, f64, usize)> {
    solve_potentials_capped(p, tol, iteration_cap(p.unknowns()))
}

pub fn solve_potentials_capped(
    p: &ResistanceProblem,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, usize)> {
    let n = p.unknowns();
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    r[0] = 1.0;
    let inv: Vec<f64> = p.degree.iter().map(|d| 1.0 / d).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(a, b)| a * b).collect();
    let mut d = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 0..=max_iter {
        res = libm::sqrt(dot(&r, &r));
        if res <= tol {
            return Ok((x, res, it));
        }
        if it == max_iter {
            break;
        }
        p.apply(&d, &mut q);
        let step = rz / dot(&d, &q);
        for i in 0..n {
            x[i] += step * d[i];
            r[i] -= step * q[i];
            z[i] = r[i] * inv[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            d[i] = z[i] + beta * d[i];
        }
    }
    Err(Error::NumericalFailure {
        residual: res,
        iterations: max_iter,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Iterative solve; the right-hand side has norm 1 so the residual is relative.
pub fn effective_resistance(p: &ResistanceProblem, tol: f64) -> Result<ResistanceEstimate> {
    let (v, residual, iterations) = solve_potentials(p, tol)?;
    Ok(ResistanceEstimate {
        value: v[0],
        method: Method::Iterative,
        residual,
        iterations,
    })
}

/// Dense Cholesky solve, for systems of at most [`DENSE_LIMIT`] unknowns.
pub fn effective_resistance_dense(p: &ResistanceProblem) -> Result<ResistanceEstimate> {
    let v = dense_potentials(p)?;
    let mut lv = vec![0.0; v.len()];
    p.apply(&v, &mut lv);
    lv[0] -= 1.0;
    Ok(ResistanceEstimate {
        value: v[0],
        method: Method::ExactDense,
        residual: libm::sqrt(dot(&lv, &lv)),
        iterations: 0,
    })
}

pub fn dense_potentials(p: &ResistanceProblem) -> Result<Vec<f64>> {
    let n = p.unknowns();
    if n > DENSE_LIMIT {
        return Err(Error::Capacity {
            requested: n as u128,
            limit: DENSE_LIMIT as u128,
        });
    }
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = p.degree[i];
        for &j in p.local.neighbors(i as u32) {
            a[i * n + j as usize] -= 1.0;
        }
    }
    // In-place lower Cholesky factor.
    for j in 0..n {
        let mut s = a[j * n + j];
        for k in 0..j {
            s -= a[j * n + k] * a[j * n + k];
        }
        if s <= 0.0 {
            return Err(Error::NumericalFailure {
                residual: s,
                iterations: j,
            });
        }
        let l = libm::sqrt(s);
        a[j * n + j] = l;
        for i in j + 1..n {
            let mut t = a[i * n + j];
            for k in 0..j {
                t -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = t / l;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut t = if i == 0 { 1.0 } else { 0.0 };
        for k in 0..i {
            t -= a[i * n + k] * y[k];
        }
        y[i] = t / a[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut t = y[i];
        for k in i + 1..n {
            t -= a[k * n + i] * x[k];
        }
        x[i] = t / a[i * n + i];
    }
    Ok(x)
}

/// Energy and conservation check of the harmonic unit current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowReport {
    /// `Σ_e θ(e)²` over undirected edges.
    pub energy: f64,
    /// Net current leaving the source.
    pub source_outflow: f64,
    /// Largest net current at a vertex other than the source and sink.
    pub max_imbalance: f64,
}

pub fn flow_energy(p: &ResistanceProblem, tol: f64) -> Result<FlowReport> {
    let (v, _, _) = solve_potentials(p, tol)?;
    Ok(flow_from_potentials(p, &v))
}

pub fn flow_from_potentials(p: &ResistanceProblem, v: &[f64]) -> FlowReport {
    let mut energy = 0.0;
    let mut max_imbalance: f64 = 0.0;
    let mut source_outflow = 0.0;
    for i in 0..v.len() {
        let mut net = p.sink_edges[i] as f64 * v[i];
        energy += p.sink_edges[i] as f64 * v[i] * v[i];
        for &j in p.local.neighbors(i as u32) {
            let current = v[i] - v[j as usize];
            net += current;
            if (i as u32) < j {
                energy += current * current;
            }
        }
        if i == 0 {
            source_outflow = net;
        } else {
            max_imbalance = max_imbalance.max(libm::fabs(net));
        }
    }
    FlowReport {
        energy,
        source_outflow,
        max_imbalance,
    }
}

/// Resistance between the origin and the cluster vertices outside `B_k(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellResistance {
    pub k: u32,
    pub estimate: ResistanceEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceProfile {
    pub entries: Vec<ShellResistance>,
    /// Shells whose sink set the origin's cluster does not reach.
    pub skipped: Vec<u32>,
    /// Values are nondecreasing in `k` up to solver accuracy.
    pub monotone: bool,
}

impl ResistanceProfile {
    /// `(k, R_k)` pairs of the solved shells.
    pub fn series(&self) -> Vec<(u32, f64)> {
        self.entries.iter().map(|e| (e.k, e.estimate.value)).collect()
    }
}

/// Relative slack granted to monotonicity checks between iterative solves.
pub const MONOTONE_SLACK: f64 = 1e-6;

pub fn resistance_profile(g: &PercolationGraph, shells: &[u32], tol: f64) -> Result<ResistanceProfile> {
    if g.degree(0) == 0 {
        return Err(Error::invalid("the origin is isolated"));
    }
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let mut shells = shells.to_vec();
    shells.sort_unstable();
    shells.dedup();
    for k in shells {
        if k >= g.depth() {
            skipped.push(k);
            continue;
        }
        let edge = g.hierarchy().pow(k);
        match ResistanceProblem::new(g.adjacency(), 0, |v| v as u64 >= edge) {
            Ok(p) => entries.push(ShellResistance {
                k,
                estimate: effective_resistance(&p, tol)?,
            }),
            Err(Error::InvalidInput(_)) => skipped.push(k),
            Err(e) => return Err(e),
        }
    }
    let monotone = entries
        .windows(2)
        .all(|w| w[1].estimate.value >= w[0].estimate.value * (1.0 - MONOTONE_SLACK));
    Ok(ResistanceProfile {
        entries,
        skipped,
        monotone,
    })
}

/// Partial sums `Σ 1/|Π_j|` over the separating rows of a cutset report.
#[derive(Debug, Clone, PartialEq)]
pub struct NashWilliams {
    /// `(j, |Π_j|, partial sum through j)` for each separating row.
    pub partial_sums: Vec<(u32, usize, f64)>,
    pub total: f64,
}

/// Lower bound on the resistance from the origin to beyond the outermost
/// separating cutset. An empty separating cutset with nothing beyond it means
/// the cluster is confined and the bound is infinite.
pub fn nash_williams_bound(report: &CutsetReport) -> Result<NashWilliams> {
    let mut sum = 0.0;
    let mut partial_sums = Vec::new();
    for row in report.rows.iter().filter(|r| r.separating) {
        if row.size() == 0 {
            if row.populated_beyond {
                return Err(Error::InconsistentCutset { j: row.j });
            }
            sum = f64::INFINITY;
        } else {
            sum += 1.0 / row.size() as f64;
        }
        partial_sums.push((row.j, row.size(), sum));
    }
    Ok(NashWilliams {
        partial_sums,
        total: sum,
    })
}

/// Nash-Williams sum from plain cutset sizes.
pub fn nash_williams_sum(sizes: &[usize]) -> f64 {
    sizes
        .iter()
        .map(|&s| if s == 0 { f64::INFINITY } else { 1.0 / s as f64 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32) -> Vec<(u32, u32)> {
        (0..n).map(|i| (i, i + 1)).collect()
    }

    #[test]
    fn series_and_parallel() {
        let p = ResistanceProblem::from_edges(4, &path(3), 0, &[3]).unwrap();
        let r = effective_resistance(&p, 1e-12).unwrap();
        assert!((r.value - 3.0).abs() < 1e-10);
        let tri = ResistanceProblem::from_edges(3, &[(0, 1), (1, 2), (0, 2)], 0, &[1]).unwrap();
        assert!((effective_resistance(&tri, 1e-12).unwrap().value - 2.0 / 3.0).abs() < 1e-10);
        let k4: Vec<(u32, u32)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        let p = ResistanceProblem::from_edges(4, &k4, 0, &[3]).unwrap();
        assert!((effective_resistance_dense(&p).unwrap().value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flow_identities() {
        let p = ResistanceProblem::from_edges(2, &[(0, 1)], 0, &[1]).unwrap();
        let f = flow_energy(&p, 1e-12).unwrap();
        assert!((f.energy - 1.0).abs() < 1e-12);
        let p = ResistanceProblem::from_edges(6, &path(5), 0, &[5]).unwrap();
        let f = flow_energy(&p, 1e-13).unwrap();
        assert!((f.energy - 5.0).abs() < 1e-9);
        assert!((f.source_outflow - 1.0).abs() < 1e-10);
        assert!(f.max_imbalance < 1e-10);
    }

    #[test]
    fn disconnected_and_bad_inputs() {
        assert!(ResistanceProblem::from_edges(4, &[(0, 1), (2, 3)], 0, &[3]).is_err());
        assert!(ResistanceProblem::from_edges(2, &[(0, 1)], 0, &[0]).is_err());
    }

    #[test]
    fn iteration_cap_is_surfaced() {
        let p = ResistanceProblem::from_edges(200, &path(199), 0, &[199]).unwrap();
        assert!(matches!(
            solve_potentials_capped(&p, 1e-12, 3),
            Err(Error::NumericalFailure { iterations: 3, .. })
        ));
    }

    #[test]
    fn nash_williams_sums() {
        assert_eq!(nash_williams_sum(&[1, 1, 1, 1]), 4.0);
        let geo: Vec<usize> = (1..=10).map(|j| 1usize << j).collect();
        let s = nash_williams_sum(&geo);
        assert!((s - (1.0 - 1.0 / 1024.0)).abs() < 1e-15);
    }
}
