//! Closed-form connection laws and the quantities derived from them.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Base used for every logarithm in the connection laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Two,
    Ten,
}

/// All `log` occurrences (in `c_k`, the schedule `k_n`, `κ_j`, exponents such
/// as `n^{b log N}`) use this base.
pub const LOG_BASE: LogBase = LogBase::Natural;

#[inline]
pub fn log(x: f64) -> f64 {
    match LOG_BASE {
        LogBase::Natural => libm::log(x),
        LogBase::Two => libm::log2(x),
        LogBase::Ten => libm::log10(x),
    }
}

/// Connection law `p_{x,y} = min(c_k / N^{(1+δ)k}, 1)` at distance `k`, with
/// `c_k = C0 + C1 log k + C2 k^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivityProfile {
    pub order: u32,
    pub delta: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
}

impl ConnectivityProfile {
    pub fn new(order: u32, delta: f64, c0: f64, c1: f64, c2: f64, alpha: f64) -> Result<Self> {
        let p = ConnectivityProfile {
            order,
            delta,
            c0,
            c1,
            c2,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    /// The critical (`δ = 1`) polynomial law `c_k = C2 k^α`.
    pub fn critical(order: u32, c2: f64, alpha: f64) -> Result<Self> {
        Self::new(order, 1.0, 0.0, 0.0, c2, alpha)
    }

    /// Constant law `c_k = C0`.
    pub fn constant(order: u32, delta: f64, c0: f64) -> Result<Self> {
        Self::new(order, delta, c0, 0.0, 0.0, 1.0)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.order, self.delta, self.c0, self.c1, self.c2, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::invalid("order N must be at least 2"));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid("delta must be finite and positive"));
        }
        let cs = [self.c0, self.c1, self.c2];
        if cs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::invalid("C0, C1, C2 must be finite and non-negative"));
        }
        if cs.iter().all(|&c| c == 0.0) {
            return Err(Error::invalid("at least one of C0, C1, C2 must be positive"));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::invalid("alpha must be finite and positive"));
        }
        Ok(())
    }

    pub fn is_critical(&self) -> bool {
        self.delta == 1.0
    }

    pub fn c_k(&self, k: u32) -> Result<f64> {
        c_k(self, k)
    }

    pub fn edge_prob(&self, k: u32) -> Result<f64> {
        edge_prob(self, k)
    }
}

/// `c_k = C0 + C1 log k + C2 k^α`, `k >= 1`.
pub fn c_k(profile: &ConnectivityProfile, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("c_k is defined for k >= 1"));
    }
    let k = k as f64;
    let mut c = profile.c0 + profile.c1 * log(k);
    if profile.c2 != 0.0 {
        c += profile.c2 * libm::pow(k, profile.alpha);
    }
    Ok(c)
}

/// `min(c_k / N^{(1+δ)k}, 1)`.
pub fn edge_prob(profile: &ConnectivityProfile, k: u32) -> Result<f64> {
    let c = c_k(profile, k)?;
    let scale = libm::pow(profile.order as f64, (1.0 + profile.delta) * k as f64);
    Ok((c / scale).clamp(0.0, 1.0))
}

/// Probability that the clusters of two `(k-1)`-balls with densities `x1`,
/// `x2` inside a `k`-ball are joined by at least one edge:
/// `1 - (1 - p_k)^{N^{2(k-1)} x1 x2}` with a real exponent.
pub fn pair_connect_prob(x1: f64, x2: f64, k: u32, profile: &ConnectivityProfile) -> Result<f64> {
    if !profile.is_critical() {
        return Err(Error::UnsupportedProfile(alloc::format!(
            "ball connection law needs delta = 1, got {}",
            profile.delta
        )));
    }
    if !(0.0..=1.0).contains(&x1) || !(0.0..=1.0).contains(&x2) {
        return Err(Error::invalid("densities must lie in [0, 1]"));
    }
    let p = edge_prob(profile, k)?;
    let n = profile.order as f64;
    let exponent = libm::pow(n, 2.0 * (k as f64 - 1.0)) * x1 * x2;
    Ok(connect_prob_from(p, exponent))
}

/// `1 - (1 - p)^exponent`, stable for tiny `p`.
#[inline]
pub(crate) fn connect_prob_from(p: f64, exponent: f64) -> f64 {
    if exponent <= 0.0 || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    (-libm::expm1(exponent * libm::log1p(-p))).clamp(0.0, 1.0)
}

/// Probability that `G(n, 1 - q)` is connected, by the recursion
/// `P(n) = 1 - sum_{k=1}^{n-1} C(n-1, k-1) P(k) q^{k(n-k)}`.
pub fn er_connected_prob(n: usize, q: f64) -> Result<f64> {
    Ok(er_recursion(n, q)?.0)
}

/// `1 - P(n, q)`, evaluated as the sum in the recursion so that it keeps full
/// relative precision when it is tiny.
pub fn er_disconnected_prob(n: usize, q: f64) -> Result<f64> {
    Ok(er_recursion(n, q)?.1)
}

fn er_recursion(n: usize, q: f64) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::invalid("graph needs at least one vertex"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid("q must lie in [0, 1]"));
    }
    let mut probs = vec![0.0f64; n + 1];
    probs[1] = 1.0;
    let mut failure = 0.0;
    // Row m - 1 of Pascal's triangle while computing P(m).
    let mut row: Vec<f64> = vec![1.0];
    for m in 2..=n {
        let mut next = vec![1.0; m];
        for i in 1..m - 1 {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
        let mut s = 0.0;
        for k in 1..m {
            let e = (k * (m - k)) as f64;
            s += row[k - 1] * probs[k] * libm::pow(q, e);
        }
        failure = s.clamp(0.0, 1.0);
        probs[m] = 1.0 - failure;
    }
    Ok((probs[n], failure))
}

/// Margin applied to the leading coefficient in [`connectivity_coefficient`].
pub const COEFFICIENT_SAFETY_FACTOR: f64 = 2.0;

/// Coefficient `C(N)` in `P(N, q) >= 1 - C(N) q^{N-1}` as `q -> 0`.
///
/// The leading term of `1 - P(N, q)` has order `q^{N-1}` and comes from the
/// `k = 1` and `k = N - 1` summands, whose coefficients are `1` and `N - 1`
/// (one summand when `N = 2`). The returned constant is that leading
/// coefficient times [`COEFFICIENT_SAFETY_FACTOR`].
pub fn connectivity_coefficient(order: u32) -> f64 {
    let leading = if order <= 2 { 1.0 } else { order as f64 };
    COEFFICIENT_SAFETY_FACTOR * leading
}

/// Failure bounds for connecting balls whose densities are at least `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBounds {
    /// `q_k(ε) = exp(-C2 ε² k^α / N²)`: two balls fail to connect.
    pub q_k: f64,
    /// `C(N) q_k(ε)^{N-1}`: the `N` balls of a `k`-ball fail to connect.
    pub q_n_k: f64,
}

pub fn q_bounds(params: &AnalysisParams, profile: &ConnectivityProfile, k: u32) -> Result<QBounds> {
    if !profile.is_critical() {
        return Err(Error::UnsupportedProfile(
            "q-bounds need delta = 1".into(),
        ));
    }
    let n = profile.order as f64;
    let kf = k as f64;
    let q_k = libm::exp(-profile.c2 * params.eps * params.eps * libm::pow(kf, profile.alpha) / (n * n));
    let q_n_k = connectivity_coefficient(profile.order) * libm::pow(q_k, n - 1.0);
    Ok(QBounds { q_k, q_n_k })
}

/// Scale schedule `k_n = floor(K n log n)` with the companion law
/// `c'_{k_n} = C + a log n · n^{b log N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleProfile {
    pub scale: f64,
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

impl ScheduleProfile {
    pub fn new(scale: f64, c: f64, a: f64, b: f64) -> Result<Self> {
        let s = ScheduleProfile { scale, c, a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::invalid("schedule scale K must be positive"));
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::invalid("schedule constant C must be non-negative"));
        }
        if !(self.a.is_finite() && self.a > 0.0 && self.b.is_finite() && self.b > 0.0) {
            return Err(Error::invalid("schedule constants a, b must be positive"));
        }
        Ok(())
    }

    pub fn k_n(&self, n: u64) -> u64 {
        schedule_k_n(self, n)
    }

    /// `c'_{k_n} = C + a log n · n^{b log N}`.
    pub fn c_prime(&self, n: u64, order: u32) -> f64 {
        let nf = n as f64;
        self.c + self.a * log(nf) * libm::pow(nf, self.b * log(order as f64))
    }

    /// `k_{n+1} - k_n`, which grows like `K log n`.
    pub fn gap(&self, n: u64) -> u64 {
        self.k_n(n + 1) - self.k_n(n)
    }

    /// `2 / log N < K < b`.
    pub fn in_scaling_regime(&self, order: u32) -> bool {
        2.0 / log(order as f64) < self.scale && self.scale < self.b
    }

    /// `0 < b < 2 - 1 / log N`, where long edges skipping two annuli
    /// eventually disappear.
    pub fn in_no_skipping_regime(&self, order: u32) -> bool {
        self.b < 2.0 - 1.0 / log(order as f64)
    }
}

/// `k_n = floor(K n log n)`, `n >= 1`.
pub fn schedule_k_n(sched: &ScheduleProfile, n: u64) -> u64 {
    if n <= 1 {
        return 0;
    }
    let nf = n as f64;
    libm::floor(sched.scale * nf * log(nf)) as u64
}

/// `κ_j = a 2^α log j · j^α`.
pub fn kappa_j(a: f64, alpha: f64, j: u32) -> f64 {
    let jf = j as f64;
    a * libm::pow(2.0, alpha) * log(jf) * libm::pow(jf, alpha)
}

/// `(mean - a/2) / (1 - a/2)`, a lower bound for `P(X >= a/2)` valid for any
/// `[0, 1]`-valued `X` with the given mean.
pub fn second_moment_lower_bound(mean: f64, a: f64) -> f64 {
    (mean - a / 2.0) / (1.0 - a / 2.0)
}

/// `a² / (2(2 - a))`.
pub fn origin_cluster_bound(a: f64) -> f64 {
    a * a / (2.0 * (2.0 - a))
}

/// `prod_j (D_j + 1) - 1` for consecutive expected diameters `D_j`.
pub fn path_length_bound(diameters: &[f64]) -> Result<f64> {
    if diameters.is_empty() {
        return Err(Error::invalid("path length bound needs at least one diameter"));
    }
    if diameters.iter().any(|d| !(*d >= 0.0)) {
        return Err(Error::invalid("diameters must be non-negative"));
    }
    Ok(diameters.iter().map(|d| d + 1.0).product::<f64>() - 1.0)
}

/// Tuning constants for the density diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub eps: f64,
    pub beta: f64,
    pub gamma: f64,
    pub s: f64,
}

/// Mean level that keeps the contraction of `z_n` going.
pub const MEAN_CONSISTENCY_THRESHOLD: f64 = 2.0 / 3.0;
/// Mass above `ε` required at the starting level.
pub const INITIAL_MASS_THRESHOLD: f64 = 0.75;
/// Lower bound required of the survival product.
pub const SURVIVAL_PRODUCT_THRESHOLD: f64 = 0.9;

impl Default for AnalysisParams {
    /// `2ε = 0.1`, `s = 0.775`.
    fn default() -> Self {
        AnalysisParams {
            eps: 0.05,
            beta: 0.5,
            gamma: 0.9,
            s: 0.775,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps", self.eps),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("s", self.s),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(alloc::format!("{name} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    /// Checks the profile-dependent ranges: `(1+δ)/2 < γ < 1` when `δ < 1`.
    pub fn validate_for(&self, profile: &ConnectivityProfile) -> Result<()> {
        self.validate()?;
        if profile.delta < 1.0 && self.gamma <= (1.0 + profile.delta) / 2.0 {
            return Err(Error::invalid("gamma must exceed (1 + delta) / 2"));
        }
        Ok(())
    }

    /// `s + ε / (2(1 - s)) <= 1`.
    pub fn contraction_admissible(&self) -> bool {
        self.s + self.eps / (2.0 * (1.0 - self.s)) <= 1.0
    }
}
