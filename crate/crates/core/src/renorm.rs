//! Monte Carlo iteration of the density recursion.
//!
//! A level-`k` ball consists of `N` level-`(k-1)` balls whose largest
//! clusters have densities `x_1..x_N`. Two of them are joined with probability
//! [`pair_connect_prob`]; the new density is `(1/N) Σ_{i ∈ C*} x_i` where `C*`
//! is the component of largest mass `Σ x_i`. Iterating this map on an
//! empirical population approximates the law of the density at every level.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::cluster::density_population;
use crate::graph::PercolationGraph;
use crate::model::{
    origin_cluster_bound, pair_connect_prob, q_bounds, second_moment_lower_bound, AnalysisParams,
    ConnectivityProfile,
};
use crate::rng::{substream, tag};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationSource {
    DirectSimulation,
    Recursion,
}

/// Sample of the density law at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPopulation {
    pub level: u32,
    pub samples: Vec<f64>,
    pub seed: u64,
    pub source: PopulationSource,
}

impl DensityPopulation {
    /// The level-0 population: every ball is a single vertex.
    pub fn ones(size: usize, seed: u64) -> Self {
        DensityPopulation {
            level: 0,
            samples: vec![1.0; size],
            seed,
            source: PopulationSource::Recursion,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Unbiased sample variance (0 for fewer than two samples).
    pub fn variance(&self) -> f64 {
        let n = self.samples.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
    }

    pub fn std_error(&self) -> f64 {
        libm::sqrt(self.variance() / self.samples.len() as f64)
    }

    /// Fraction of samples below `t`.
    pub fn fraction_below(&self, t: f64) -> f64 {
        self.samples.iter().filter(|&&x| x < t).count() as f64 / self.samples.len() as f64
    }
}

/// One application of the density recursion. Output sample `i` uses its own
/// random stream keyed by `(seed, output level, i)`.
pub fn renorm_step(
    pop: &DensityPopulation,
    profile: &ConnectivityProfile,
    out_size: usize,
    seed: u64,
) -> Result<DensityPopulation> {
    if pop.is_empty() {
        return Err(Error::invalid("empty density population"));
    }
    if !profile.is_critical() {
        return Err(Error::UnsupportedProfile(
            "the density recursion needs delta = 1".into(),
        ));
    }
    let level = pop.level + 1;
    let n = profile.order as usize;
    let mut x = vec![0.0f64; n];
    let mut parent = vec![0usize; n];
    let mut mass = vec![0.0f64; n];
    let mut samples = Vec::with_capacity(out_size);
    for i in 0..out_size {
        let mut rng = substream(seed, &[tag::RENORM, level as u64, i as u64]);
        for xi in x.iter_mut() {
            *xi = pop.samples[rng.random_range(0..pop.len())];
        }
        for (v, p) in parent.iter_mut().enumerate() {
            *p = v;
        }
        for a in 0..n {
            for b in a + 1..n {
                let u: f64 = rng.random();
                if u < pair_connect_prob(x[a], x[b], level, profile)? {
                    let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        mass.fill(0.0);
        for (v, &xv) in x.iter().enumerate().take(n) {
            let r = root(&mut parent, v);
            mass[r] += xv;
        }
        // Ties between components of equal mass give the same value.
        let best = mass.iter().copied().fold(0.0, f64::max);
        samples.push((best / n as f64).clamp(0.0, 1.0));
    }
    Ok(DensityPopulation {
        level,
        samples,
        seed,
        source: PopulationSource::Recursion,
    })
}

fn root(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Summary of one population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormDiagnostics {
    pub level: u32,
    pub mean: f64,
    pub var: f64,
    pub std_error: f64,
    /// `P(X < ε)`.
    pub z_eps: f64,
    /// Threshold of `r_t`.
    pub t: f64,
    /// `P(X >= t)`.
    pub r_t: f64,
    /// `q_level(ε)` for comparison with `z_eps`.
    pub q_ref: f64,
    pub pop_size: usize,
}

/// Diagnostics with `t = N ε`.
pub fn diagnostics(
    pop: &DensityPopulation,
    profile: &ConnectivityProfile,
    params: &AnalysisParams,
) -> Result<RenormDiagnostics> {
    diagnostics_with_threshold(pop, profile, params, profile.order as f64 * params.eps)
}

pub fn diagnostics_with_threshold(
    pop: &DensityPopulation,
    profile: &ConnectivityProfile,
    params: &AnalysisParams,
    t: f64,
) -> Result<RenormDiagnostics> {
    if pop.is_empty() {
        return Err(Error::invalid("empty density population"));
    }
    Ok(RenormDiagnostics {
        level: pop.level,
        mean: pop.mean(),
        var: pop.variance(),
        std_error: pop.std_error(),
        z_eps: pop.fraction_below(params.eps),
        t,
        r_t: 1.0 - pop.fraction_below(t),
        q_ref: q_bounds(params, profile, pop.level)?.q_k,
        pop_size: pop.len(),
    })
}

/// Runs the recursion from the all-ones level-0 population through `levels`
/// steps; returns diagnostics for levels `0..=levels`.
pub fn run_recursion(
    profile: &ConnectivityProfile,
    levels: u32,
    pop_size: usize,
    seed: u64,
    params: &AnalysisParams,
) -> Result<Vec<RenormDiagnostics>> {
    let mut out = Vec::with_capacity(levels as usize + 1);
    run_recursion_with(profile, levels, pop_size, seed, |pop| {
        out.push(diagnostics(pop, profile, params)?);
        Ok(())
    })?;
    Ok(out)
}

/// Like [`run_recursion`] but hands every population to `visit`.
pub fn run_recursion_with(
    profile: &ConnectivityProfile,
    levels: u32,
    pop_size: usize,
    seed: u64,
    mut visit: impl FnMut(&DensityPopulation) -> Result<()>,
) -> Result<()> {
    if levels < 1 {
        return Err(Error::invalid("the recursion needs at least one level"));
    }
    if pop_size < 1 {
        return Err(Error::invalid("population size must be positive"));
    }
    let mut pop = DensityPopulation::ones(pop_size, seed);
    visit(&pop)?;
    for _ in 0..levels {
        pop = renorm_step(&pop, profile, pop_size, seed)?;
        visit(&pop)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateReport {
    /// Minimum of `(E[X_n] - a/2)/(1 - a/2)` over levels `>= n0`.
    pub min_lower_bound: f64,
    /// `a² / (2(2 - a))`.
    pub origin_bound: f64,
    pub levels_checked: usize,
    /// Both bounds are positive at every observed level `>= n0`.
    pub certified: bool,
}

pub fn percolation_certificate(diags: &[RenormDiagnostics], a: f64, n0: u32) -> Result<CertificateReport> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid("certificate parameter a must lie in (0, 1)"));
    }
    let bounds: Vec<f64> = diags
        .iter()
        .filter(|d| d.level >= n0)
        .map(|d| second_moment_lower_bound(d.mean, a))
        .collect();
    let min_lower_bound = bounds.iter().copied().fold(f64::INFINITY, f64::min);
    let origin_bound = origin_cluster_bound(a);
    Ok(CertificateReport {
        min_lower_bound,
        origin_bound,
        levels_checked: bounds.len(),
        certified: !bounds.is_empty() && min_lower_bound > 0.0 && origin_bound > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossValidationRow {
    pub level: u32,
    pub direct_mean: f64,
    pub direct_var: f64,
    pub direct_se: f64,
    pub recursion_mean: f64,
    pub recursion_var: f64,
    pub recursion_se: f64,
    /// `direct_mean - recursion_mean`.
    pub mean_gap: f64,
    pub var_gap: f64,
    /// `recursion_mean <= direct_mean + 2 sqrt(se_d² + se_r²)`.
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub rows: Vec<CrossValidationRow>,
}

impl CrossValidation {
    pub fn all_dominated(&self) -> bool {
        self.rows.iter().all(|r| r.dominated)
    }
}

/// Compares recursion diagnostics with the ball densities of sampled graphs
/// (pooled over `graphs`) at every diagnosed level.
pub fn cross_validate(graphs: &[PercolationGraph], diags: &[RenormDiagnostics]) -> Result<CrossValidation> {
    let first = graphs
        .first()
        .ok_or(Error::invalid("cross validation needs at least one graph"))?;
    let depth = first.depth();
    if graphs.iter().any(|g| g.depth() != depth || g.order() != first.order()) {
        return Err(Error::invalid("graphs must share order and depth"));
    }
    let mut rows = Vec::with_capacity(diags.len());
    for d in diags {
        if d.level > depth {
            return Err(Error::invalid("diagnosed level exceeds the sampled depth"));
        }
        let mut pooled = DensityPopulation {
            level: d.level,
            samples: Vec::new(),
            seed: first.seed(),
            source: PopulationSource::DirectSimulation,
        };
        for g in graphs {
            pooled.samples.extend(density_population(g, d.level)?.samples);
        }
        let (dm, dv, dse) = (pooled.mean(), pooled.variance(), pooled.std_error());
        let joint = libm::sqrt(dse * dse + d.std_error * d.std_error);
        rows.push(CrossValidationRow {
            level: d.level,
            direct_mean: dm,
            direct_var: dv,
            direct_se: dse,
            recursion_mean: d.mean,
            recursion_var: d.var,
            recursion_se: d.std_error,
            mean_gap: dm - d.mean,
            var_gap: dv - d.var,
            dominated: d.mean <= dm + 2.0 * joint + 1e-12,
        });
    }
    Ok(CrossValidation { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pop(level: u32, samples: &[f64]) -> DensityPopulation {
        DensityPopulation {
            level,
            samples: samples.to_vec(),
            seed: 0,
            source: PopulationSource::Recursion,
        }
    }

    #[test]
    fn forced_connection_and_isolation() {
        let on = ConnectivityProfile::critical(2, 1e9, 1.0).unwrap();
        let off = ConnectivityProfile::critical(2, 1e-300, 1.0).unwrap();
        let p = pop(3, &[0.25, 0.75]);
        let joined = renorm_step(&p, &on, 2000, 1).unwrap();
        let apart = renorm_step(&p, &off, 2000, 1).unwrap();
        // Both steps see the same pairs of inputs.
        for i in 0..2000 {
            let a = joined.samples[i];
            assert!([0.25, 0.5, 0.75].contains(&a), "{a}");
            let b = apart.samples[i];
            let expect = if a == 0.25 { 0.125 } else { 0.375 };
            assert_eq!(b, expect);
        }
        assert_eq!(joined.level, 4);
    }

    #[test]
    fn recursion_limits() {
        let params = AnalysisParams::default();
        let on = ConnectivityProfile::critical(2, 1e12, 1.0).unwrap();
        let d = run_recursion(&on, 5, 100, 3, &params).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.iter().all(|r| r.mean == 1.0 && r.var == 0.0));
        let off = ConnectivityProfile::critical(2, 1e-300, 1.0).unwrap();
        let d = run_recursion(&off, 1, 100, 3, &params).unwrap();
        assert_eq!(d[1].mean, 0.5);
    }

    #[test]
    fn certificate_examples() {
        let row = |level, mean| RenormDiagnostics {
            level,
            mean,
            var: 0.0,
            std_error: 0.0,
            z_eps: 0.0,
            t: 0.1,
            r_t: 1.0,
            q_ref: 1.0,
            pop_size: 1,
        };
        let c = percolation_certificate(&[row(0, 1.0), row(1, 1.0)], 0.5, 0).unwrap();
        assert!(c.certified);
        assert!((c.origin_bound - 1.0 / 12.0).abs() < 1e-15);
        let c = percolation_certificate(&[row(0, 1.0), row(1, 0.25)], 0.5, 0).unwrap();
        assert!(!c.certified);
        let c = percolation_certificate(&[row(0, 1.0), row(1, 0.25)], 0.5, 0).unwrap();
        assert!(c.min_lower_bound <= 0.0);
    }

    #[test]
    fn diagnostics_thresholds() {
        let profile = ConnectivityProfile::critical(2, 4.0, 1.0).unwrap();
        let params = AnalysisParams::default();
        let p = pop(2, &[0.01, 0.04, 0.05, 0.2, 1.0]);
        let d = diagnostics_with_threshold(&p, &profile, &params, params.eps).unwrap();
        assert_eq!(d.z_eps, 0.4);
        assert!((d.z_eps + d.r_t - 1.0).abs() < 1e-15);
    }
}
