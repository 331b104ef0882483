//! Replicated experiment runs: sampling, analysis, tables and the manifest.
//!
//! Replicas run in parallel and return their tables as in-memory buffers; the
//! calling thread alone writes files, in a fixed order, and the manifest last.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use hierperc_core::classify::classify_resistance_growth;
use hierperc_core::cluster::{cutsets, density_population, origin_cluster, CutsetReport};
use hierperc_core::electrical::{nash_williams_bound, resistance_profile, ResistanceProfile};
use hierperc_core::renorm::{cross_validate, percolation_certificate, run_recursion};
use hierperc_core::rng::{derive_seed, tag};
use hierperc_core::sampler::sample_graph;
use hierperc_core::sweep::{alpha_sweep, SweepConfig};
use hierperc_core::walk::{return_statistics_shell, WalkConfig};
use hierperc_core::PercolationGraph;

use crate::chart::{line_chart, Series};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::graph_io::write_graph;
use crate::tables::{self, ClassificationLine, SweepLine};

/// Which tables a run produces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stages {
    pub graph: bool,
    pub densities: bool,
    pub cutsets: bool,
    pub resist: bool,
    pub walk: bool,
    pub sweep: bool,
    /// Classifies the resistance profiles of sampled replicas.
    pub classify: bool,
    /// Classifies the config's `series_file`.
    pub classify_series: bool,
    pub renorm: bool,
}

impl Stages {
    /// Everything the configuration supports: the recursion needs `delta = 1`
    /// and the sweep needs `alphas`.
    pub fn all(cfg: &ExperimentConfig) -> Self {
        Stages {
            graph: true,
            densities: true,
            cutsets: true,
            resist: true,
            walk: true,
            sweep: !cfg.alphas.is_empty(),
            classify: true,
            classify_series: cfg.series_file.is_some(),
            renorm: cfg.profile.delta == 1.0,
        }
    }

    fn names(&self) -> Vec<&'static str> {
        let flags = [
            (self.graph, "graph"),
            (self.densities, "densities"),
            (self.cutsets, "cutsets"),
            (self.resist, "resist"),
            (self.walk, "walk"),
            (self.sweep, "sweep"),
            (self.classify, "classify"),
            (self.classify_series, "classify_series"),
            (self.renorm, "renorm"),
        ];
        flags.iter().filter(|f| f.0).map(|f| f.1).collect()
    }

    fn needs_graphs(&self) -> bool {
        self.graph || self.densities || self.cutsets || self.resist || self.walk || self.sweep || self.classify
    }
}

pub fn replica_seed(seed: u64, replica: usize) -> u64 {
    derive_seed(seed, &[tag::REPLICA, replica as u64])
}

pub fn replica_dir(replica: usize) -> String {
    format!("replica_{replica:03}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// `(relative path, sha256)` of every written file except the manifest.
    pub outputs: Vec<(String, String)>,
    pub failures: Vec<(usize, String)>,
    pub manifest_sha256: String,
}

struct ReplicaOutput {
    files: Vec<(String, Vec<u8>)>,
    series: Option<Vec<(u32, f64)>>,
    sweep: Vec<SweepLine>,
    graph: Option<PercolationGraph>,
}

fn buffer(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn run_replica(cfg: &ExperimentConfig, stages: &Stages, r: usize) -> Result<ReplicaOutput> {
    let seed = replica_seed(cfg.seed, r);
    let g = sample_graph(&cfg.sample_config(seed))?;
    let dir = replica_dir(r);
    let mut files = Vec::new();
    let mut add = |name: &str, bytes: Vec<u8>| files.push((format!("{dir}/{name}"), bytes));
    if stages.graph {
        add("graph.hpg", buffer(|b| {
            write_graph(&g, b).expect("in-memory write");
            Ok(())
        })?);
    }
    if stages.densities {
        let pops = (1..=g.depth())
            .map(|l| density_population(&g, l))
            .collect::<hierperc_core::Result<Vec<_>>>()?;
        add("densities.csv", buffer(|b| tables::write_densities(b, &pops))?);
    }
    let mut report = match cfg.cutset_range() {
        Some(range) if stages.cutsets || stages.resist => {
            cutsets(&g, &cfg.schedule, &origin_cluster(&g), range)?
        }
        _ => CutsetReport { rows: Vec::new() },
    };
    // Annuli past the sampled depth are cut short; their sizes mean nothing.
    report.rows.retain(|row| !row.truncated);
    if stages.cutsets {
        add("cutsets.csv", buffer(|b| tables::write_cutsets(b, &report))?);
    }
    let isolated = g.degree(0) == 0;
    let profile: Option<ResistanceProfile> = if (stages.resist || stages.classify) && !isolated {
        Some(resistance_profile(&g, &cfg.shells, cfg.tol)?)
    } else {
        None
    };
    if stages.resist {
        let nw = nash_williams_bound(&report)?;
        add("resistance.csv", buffer(|b| tables::write_resistance(b, profile.as_ref()))?);
        add("nash_williams.csv", buffer(|b| tables::write_nash_williams(b, Some(&nw)))?);
        if cfg.charts {
            let points = profile.iter().flat_map(|p| p.series()).map(|(k, v)| (k as f64, v)).collect();
            let svg = line_chart("effective resistance", "k", "R_k", &[Series { name: &dir, points }]);
            add("resistance.svg", svg.into_bytes());
        }
    }
    if stages.walk {
        let report = if isolated {
            None
        } else {
            let wc = WalkConfig::new(cfg.walk_replicas, cfg.walk_max_steps, seed);
            Some(return_statistics_shell(&g, &wc, cfg.walk_shell)?)
        };
        add("walk.csv", buffer(|b| tables::write_walks(b, report.as_ref()))?);
    }
    let mut sweep = Vec::new();
    if stages.sweep {
        let sc = SweepConfig {
            base: cfg.sample_config(seed),
            alphas: cfg.alphas.clone(),
            shells: cfg.shells.clone(),
            schedule: cfg.schedule,
            j_min: cfg.j_min,
            tol: cfg.tol,
            classifier: cfg.classifier,
        };
        let rep = alpha_sweep(&sc, seed)?;
        let per = rep.rows.len() / rep.labels.len().max(1);
        if !rep.monotone {
            log::warn!("{dir}: coupled resistances are not monotone in alpha");
        }
        sweep = rep
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| SweepLine {
                replica: r,
                alpha: row.alpha,
                k: row.k,
                resistance: row.resistance,
                nw_partial: row.nw_partial,
                label: rep.labels[i / per].1.as_str(),
            })
            .collect();
    }
    let keep = stages.renorm && stages.needs_graphs();
    Ok(ReplicaOutput {
        files,
        series: profile.map(|p| p.series()),
        sweep,
        graph: keep.then_some(g),
    })
}

/// Per-shell median over the replicas whose profile reaches every shell that
/// any of them reaches.
pub fn median_profile(series: &[Vec<(u32, f64)>]) -> Vec<(u32, f64)> {
    let mut shells: Vec<u32> = series.iter().flatten().map(|p| p.0).collect();
    shells.sort_unstable();
    shells.dedup();
    let full: Vec<&Vec<(u32, f64)>> = series.iter().filter(|s| s.len() == shells.len()).collect();
    if full.is_empty() {
        return Vec::new();
    }
    shells
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut v: Vec<f64> = full.iter().map(|s| s[i].1).collect();
            v.sort_by(f64::total_cmp);
            let n = v.len();
            let m = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 };
            (k, m)
        })
        .collect()
}

fn classify_line(cfg: &ExperimentConfig, target: String, series: &[(u32, f64)]) -> ClassificationLine {
    ClassificationLine {
        target,
        result: classify_resistance_growth(series, &cfg.classifier).ok(),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// More than 10% of the replicas failed.
pub fn too_many_failures(failed: usize, total: usize) -> bool {
    failed * 10 > total
}

/// Runs the requested stages and writes everything under `out`.
pub fn run_experiment(cfg: &ExperimentConfig, stages: Stages, command: &str, out: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    if stages.classify_series && cfg.series_file.is_none() {
        return Err(Error::Config("no `series_file` to classify".into()));
    }
    if stages.sweep && cfg.alphas.is_empty() {
        return Err(Error::Config("the sweep needs `alphas`".into()));
    }
    if stages.renorm && cfg.profile.delta != 1.0 {
        return Err(Error::Config("the recursion needs delta = 1".into()));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let results: Vec<Result<ReplicaOutput>> = if stages.needs_graphs() {
        (0..cfg.replicas).into_par_iter().map(|r| run_replica(cfg, &stages, r)).collect()
    } else {
        Vec::new()
    };

    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut failures = Vec::new();
    let mut series = Vec::new();
    let mut sweep = Vec::new();
    let mut graphs = Vec::new();
    let mut classes = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(o) => {
                files.extend(o.files);
                if stages.classify {
                    let s = o.series.clone().unwrap_or_default();
                    classes.push(classify_line(cfg, replica_dir(r), &s));
                }
                series.extend(o.series);
                sweep.extend(o.sweep);
                graphs.extend(o.graph);
            }
            Err(e) => {
                log::error!("{}: {e}", replica_dir(r));
                failures.push((r, e.to_string()));
            }
        }
    }

    if stages.classify || stages.classify_series {
        if stages.classify {
            let median = median_profile(&series);
            classes.push(classify_line(cfg, "median".into(), &median));
            let rows: Vec<Vec<String>> = median.iter().map(|&(k, v)| vec![k.to_string(), format!("{v:?}")]).collect();
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(["k", "median_resistance"])?;
            for row in rows {
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            files.push(("median_resistance.csv".into(), bytes));
            if cfg.charts {
                let points = median.iter().map(|&(k, v)| (k as f64, v)).collect();
                let svg = line_chart("median resistance", "k", "R_k", &[Series { name: "median", points }]);
                files.push(("median_resistance.svg".into(), svg.into_bytes()));
            }
        }
        if let (true, Some(path)) = (stages.classify_series, &cfg.series_file) {
            let s = tables::read_series(path)?;
            classes.push(classify_line(cfg, path.display().to_string(), &s));
        }
        files.push(("classification.csv".into(), buffer(|b| tables::write_classification(b, &classes))?));
    }

    if stages.sweep {
        files.push(("sweep.csv".into(), buffer(|b| tables::write_sweep(b, &sweep))?));
        if cfg.charts && !sweep.is_empty() {
            let first = sweep[0].replica;
            let names: Vec<String> = cfg.alphas.iter().map(|a| format!("alpha={a}")).collect();
            let plots: Vec<Series> = cfg
                .alphas
                .iter()
                .zip(&names)
                .map(|(&a, name)| Series {
                    name,
                    points: sweep
                        .iter()
                        .filter(|l| l.replica == first && l.alpha == a)
                        .map(|l| (l.k as f64, l.resistance))
                        .collect(),
                })
                .collect();
            let svg = line_chart("coupled resistance by alpha", "k", "R_k", &plots);
            files.push(("sweep.svg".into(), svg.into_bytes()));
        }
    }

    if stages.renorm {
        let diags = run_recursion(&cfg.profile, cfg.renorm_levels, cfg.renorm_pop, cfg.seed, &cfg.params)?;
        files.push(("renorm.csv".into(), buffer(|b| tables::write_renorm(b, &diags))?));
        let cert = percolation_certificate(&diags, cfg.cert_a, cfg.cert_n0)?;
        files.push((
            "renorm_certificate.csv".into(),
            buffer(|b| tables::write_certificate(b, cfg.cert_a, cfg.cert_n0, &cert))?,
        ));
        if !graphs.is_empty() {
            let depth = graphs[0].depth();
            let shared: Vec<_> = diags.iter().filter(|d| d.level <= depth).copied().collect();
            let cv = cross_validate(&graphs, &shared)?;
            files.push(("renorm_crossval.csv".into(), buffer(|b| tables::write_cross_validation(b, &cv))?));
        }
        if cfg.charts {
            let points = diags.iter().map(|d| (d.level as f64, d.mean)).collect();
            let svg = line_chart("recursion mean density", "level", "E[X]", &[Series { name: "mean", points }]);
            files.push(("renorm.svg".into(), svg.into_bytes()));
        }
    }

    let mut outputs = Vec::with_capacity(files.len());
    for (name, bytes) in &files {
        let path = out.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        outputs.push((name.clone(), sha256_hex(bytes)));
    }

    let mut m = String::new();
    let _ = writeln!(m, "hierperc {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "command = {command}");
    let _ = writeln!(m, "stages = {}", stages.names().join(","));
    m.push_str("\n[config]\n");
    m.push_str(&cfg.canonical());
    m.push_str("\n[seeds]\n");
    if stages.needs_graphs() {
        for r in 0..cfg.replicas {
            let _ = writeln!(m, "{} = {}", replica_dir(r), replica_seed(cfg.seed, r));
        }
    }
    if stages.renorm {
        let _ = writeln!(m, "renorm = {}", cfg.seed);
    }
    m.push_str("\n[failures]\n");
    for (r, msg) in &failures {
        let _ = writeln!(m, "{}: {msg}", replica_dir(*r));
    }
    m.push_str("\n[outputs]\n");
    for (name, hash) in &outputs {
        let _ = writeln!(m, "{hash}  {name}");
    }
    let path = out.join("manifest.txt");
    fs::write(&path, &m).map_err(|e| Error::io(&path, e))?;

    if too_many_failures(failures.len(), cfg.replicas) {
        return Err(Error::PartialFailure {
            failed: failures.len(),
            total: cfg.replicas,
        });
    }
    Ok(RunSummary {
        outputs,
        failures,
        manifest_sha256: sha256_hex(m.as_bytes()),
    })
}
