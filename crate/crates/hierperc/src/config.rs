//! Experiment configuration: a flat `key = value` file with `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hierperc_core::classify::ClassifierConfig;
use hierperc_core::graph::DEFAULT_VERTEX_BUDGET;
use hierperc_core::{AnalysisParams, ConnectivityProfile, SampleConfig, ScheduleProfile};

use crate::error::{Error, Result};

/// Accepted keys, shown by `--help`.
pub const KEYS_HELP: &str = "\
Config file keys (`key = value`, `#` starts a comment):
  N                   hierarchy order (default 2)
  delta               connection exponent delta > 0 (default 1)
  C0, C1, C2          c_k = C0 + C1 ln k + C2 k^alpha (defaults 0, 0, 4)
  alpha               polynomial exponent (default 1)
  K, C, a, b          annulus schedule k_n = floor(K n ln n) and its constants
                      (defaults K=1, C=0, a=C2 or 1 when C2=0, b=1)
  depth               sampled ball B_depth(0) (default 10)
  seed                base seed (default 1)
  replicas            independent graph samples (default 3)
  vertex_budget       largest allowed N^depth (default 16777216)
  shells              resistance shells, e.g. `1,2,5-9` (default 1..depth-1)
  tol                 relative residual of resistance solves (default 1e-8)
  renorm_levels       recursion levels (default 10)
  renorm_pop          recursion population size (default 10000)
  eps, beta, gamma, s density diagnostics (defaults 0.05, 0.5, 0.9, 0.775)
  cert_a, cert_n0     percolation certificate parameters (defaults 0.5, 1)
  walk_replicas       walks per graph (default 1000)
  walk_max_steps      step cap per walk (default 100000)
  walk_shell          walks exit beyond B_walk_shell(0) (default depth-1)
  alphas              alpha sweep exponents, ascending, e.g. `0.5,1,2`
  j_min, j_max        cutset indices (defaults 2 and the largest measurable)
  classify_window     increments inspected by the classifier (default 4)
  classify_ratio      mean increment ratio below which growth is transient-like (default 0.9)
  classify_floor_frac recurrent-like floor as a fraction of the first increment (default 0.05)
  series_file         CSV with `k,resistance` columns for `classify`
  charts              also write SVG charts (`true`/`false`, default false)
";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub profile: ConnectivityProfile,
    pub schedule: ScheduleProfile,
    pub depth: u32,
    pub seed: u64,
    pub replicas: usize,
    pub vertex_budget: u64,
    pub shells: Vec<u32>,
    pub tol: f64,
    pub renorm_levels: u32,
    pub renorm_pop: usize,
    pub params: AnalysisParams,
    pub cert_a: f64,
    pub cert_n0: u32,
    pub walk_replicas: u64,
    pub walk_max_steps: u64,
    pub walk_shell: u32,
    pub alphas: Vec<f64>,
    pub j_min: u32,
    pub j_max: Option<u32>,
    pub classifier: ClassifierConfig,
    pub series_file: Option<PathBuf>,
    pub charts: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let k = k.trim();
            if map.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let r = Reader { map };
        r.check_keys()?;
        let order = r.get("N", 2u32)?;
        let c2 = r.get("C2", 4.0)?;
        let profile = ConnectivityProfile {
            order,
            delta: r.get("delta", 1.0)?,
            c0: r.get("C0", 0.0)?,
            c1: r.get("C1", 0.0)?,
            c2,
            alpha: r.get("alpha", 1.0)?,
        };
        let schedule = ScheduleProfile {
            scale: r.get("K", 1.0)?,
            c: r.get("C", 0.0)?,
            a: r.get("a", if c2 > 0.0 { c2 } else { 1.0 })?,
            b: r.get("b", 1.0)?,
        };
        let depth = r.get("depth", 10u32)?;
        let shells = match map.get("shells") {
            Some(s) => parse_shells(s)?,
            None => (1..depth).collect(),
        };
        let params = AnalysisParams {
            eps: r.get("eps", 0.05)?,
            beta: r.get("beta", 0.5)?,
            gamma: r.get("gamma", 0.9)?,
            s: r.get("s", 0.775)?,
        };
        let alphas = match map.get("alphas") {
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Config(format!("bad list for `alphas`: `{s}`")))?,
            None => Vec::new(),
        };
        let cfg = ExperimentConfig {
            profile,
            schedule,
            depth,
            seed: r.get("seed", 1u64)?,
            replicas: r.get("replicas", 3usize)?,
            vertex_budget: r.get("vertex_budget", DEFAULT_VERTEX_BUDGET)?,
            shells,
            tol: r.get("tol", hierperc_core::electrical::DEFAULT_TOL)?,
            renorm_levels: r.get("renorm_levels", 10u32)?,
            renorm_pop: r.get("renorm_pop", 10_000usize)?,
            params,
            cert_a: r.get("cert_a", 0.5)?,
            cert_n0: r.get("cert_n0", 1u32)?,
            walk_replicas: r.get("walk_replicas", 1000u64)?,
            walk_max_steps: r.get("walk_max_steps", 100_000u64)?,
            walk_shell: r.get("walk_shell", depth.saturating_sub(1))?,
            alphas,
            j_min: r.get("j_min", 2u32)?,
            j_max: map.get("j_max").map(|_| r.get("j_max", 0u32)).transpose()?,
            classifier: ClassifierConfig {
                window: r.get("classify_window", 4usize)?,
                ratio_threshold: r.get("classify_ratio", 0.9)?,
                floor_fraction: r.get("classify_floor_frac", 0.05)?,
            },
            series_file: map.get("series_file").map(PathBuf::from),
            charts: r.get("charts", false)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field; a ball larger than the vertex budget is a capacity
    /// error, anything else a config error.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        self.profile
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.schedule
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.params
            .validate_for(&self.profile)
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.depth < 1 {
            return bad("depth must be at least 1");
        }
        if self.replicas < 1 {
            return bad("replicas must be at least 1");
        }
        if self.shells.iter().any(|&k| k < 1 || k >= self.depth) {
            return bad("shells must lie in 1..depth-1");
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("tol must lie in (0, 1)");
        }
        if self.renorm_levels < 1 || self.renorm_pop < 1 {
            return bad("renorm_levels and renorm_pop must be positive");
        }
        if !(self.cert_a > 0.0 && self.cert_a < 1.0) {
            return bad("cert_a must lie in (0, 1)");
        }
        if self.walk_replicas < 1 || self.walk_max_steps < 1 {
            return bad("walk_replicas and walk_max_steps must be positive");
        }
        if self.walk_shell >= self.depth {
            return bad("walk_shell must be below depth");
        }
        if self.alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return bad("alphas must be positive");
        }
        if self.alphas.windows(2).any(|w| w[0] > w[1]) {
            return bad("alphas must be sorted ascending");
        }
        if self.j_min < 1 || self.j_max.is_some_and(|j| j < self.j_min) {
            return bad("cutset indices need 1 <= j_min <= j_max");
        }
        let c = &self.classifier;
        if c.window < 1 || !(c.ratio_threshold > 0.0) || !(c.floor_fraction >= 0.0) {
            return bad("classifier settings out of range");
        }
        self.sample_config(self.seed).validate()?;
        Ok(())
    }

    pub fn sample_config(&self, seed: u64) -> SampleConfig {
        SampleConfig {
            depth: self.depth,
            profile: self.profile,
            seed,
            vertex_budget: self.vertex_budget,
        }
    }

    /// Cutset indices: `j_min` up to `j_max`, or up to the largest `j` whose
    /// outer annulus fits in the sampled ball.
    pub fn cutset_range(&self) -> Option<std::ops::RangeInclusive<u32>> {
        let j_max = self.j_max.or_else(|| {
            (self.j_min..)
                .take_while(|&j| self.schedule.k_n(2 * j as u64 + 4) <= self.depth as u64)
                .last()
        })?;
        Some(self.j_min..=j_max)
    }

    /// Resolved configuration as sorted `key = value` lines.
    pub fn canonical(&self) -> String {
        let p = &self.profile;
        let list = |v: &[String]| v.join(",");
        let mut entries: Vec<(&str, String)> = vec![
            ("N", p.order.to_string()),
            ("delta", format!("{:?}", p.delta)),
            ("C0", format!("{:?}", p.c0)),
            ("C1", format!("{:?}", p.c1)),
            ("C2", format!("{:?}", p.c2)),
            ("alpha", format!("{:?}", p.alpha)),
            ("K", format!("{:?}", self.schedule.scale)),
            ("C", format!("{:?}", self.schedule.c)),
            ("a", format!("{:?}", self.schedule.a)),
            ("b", format!("{:?}", self.schedule.b)),
            ("depth", self.depth.to_string()),
            ("seed", self.seed.to_string()),
            ("replicas", self.replicas.to_string()),
            ("vertex_budget", self.vertex_budget.to_string()),
            ("shells", list(&self.shells.iter().map(|k| k.to_string()).collect::<Vec<_>>())),
            ("tol", format!("{:?}", self.tol)),
            ("renorm_levels", self.renorm_levels.to_string()),
            ("renorm_pop", self.renorm_pop.to_string()),
            ("eps", format!("{:?}", self.params.eps)),
            ("beta", format!("{:?}", self.params.beta)),
            ("gamma", format!("{:?}", self.params.gamma)),
            ("s", format!("{:?}", self.params.s)),
            ("cert_a", format!("{:?}", self.cert_a)),
            ("cert_n0", self.cert_n0.to_string()),
            ("walk_replicas", self.walk_replicas.to_string()),
            ("walk_max_steps", self.walk_max_steps.to_string()),
            ("walk_shell", self.walk_shell.to_string()),
            ("alphas", list(&self.alphas.iter().map(|a| format!("{a:?}")).collect::<Vec<_>>())),
            ("j_min", self.j_min.to_string()),
            ("j_max", self.j_max.map_or("auto".into(), |j| j.to_string())),
            ("classify_window", self.classifier.window.to_string()),
            ("classify_ratio", format!("{:?}", self.classifier.ratio_threshold)),
            ("classify_floor_frac", format!("{:?}", self.classifier.floor_fraction)),
            ("charts", self.charts.to_string()),
        ];
        if let Some(f) = &self.series_file {
            entries.push(("series_file", f.display().to_string()));
        }
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for (k, v) in entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_map(&BTreeMap::new()).expect("defaults are valid")
    }
}

const KNOWN_KEYS: &[&str] = &[
    "N", "delta", "C0", "C1", "C2", "alpha", "K", "C", "a", "b", "depth", "seed", "replicas",
    "vertex_budget", "shells", "tol", "renorm_levels", "renorm_pop", "eps", "beta", "gamma", "s",
    "cert_a", "cert_n0", "walk_replicas", "walk_max_steps", "walk_shell", "alphas", "j_min",
    "j_max", "classify_window", "classify_ratio", "classify_floor_frac", "series_file", "charts",
];

struct Reader<'a> {
    map: &'a BTreeMap<String, String>,
}

impl Reader<'_> {
    fn check_keys(&self) -> Result<()> {
        match self.map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("bad value for `{key}`: `{v}`"))),
        }
    }
}

/// `1,2,5-9` style lists; ranges are inclusive.
fn parse_shells(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::Config(format!("bad shell list `{s}`"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) => {
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = ExperimentConfig::parse(
            "# demo\nN = 3\ndepth = 5  # small\nC2 = 2.5\nshells = 1, 3-4\nalphas = 0.5,2\n",
        )
        .unwrap();
        assert_eq!(cfg.profile.order, 3);
        assert_eq!(cfg.shells, [1, 3, 4]);
        assert_eq!(cfg.alphas, [0.5, 2.0]);
        assert_eq!(cfg.schedule.a, 2.5);
        assert_eq!(cfg.walk_shell, 4);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "N = 1",
            "unknown = 3",
            "depth = 4\ndepth = 5",
            "alpha = -1",
            "alphas = 2,1",
            "shells = 0",
            "depth = 5\nshells = 5",
            "novalue",
        ] {
            let e = ExperimentConfig::parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{text}: {e}");
        }
        let e = ExperimentConfig::parse("depth = 30").unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn canonical_form_reparses() {
        let cfg = ExperimentConfig::parse("N = 2\ndepth = 6\nalphas = 1,2\nj_max = 3").unwrap();
        let text = cfg.canonical().replace("j_max = auto\n", "");
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
    }
}
