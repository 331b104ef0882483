//! Line-oriented text format for sampled graphs.
//!
//! ```text
//! hpg1 N=2 k=4 seed=7 delta=1.0 C0=0.0 C1=0.0 C2=1.0 alpha=1.0
//! 0 1 1
//! 0 5 3
//! ```
//!
//! Each edge line is `<u> <v> <dist>` with `u < v`. Reals are written in the
//! shortest form that parses back to the same value.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use hierperc_core::{ConnectivityProfile, Edge, PercolationGraph, SampleConfig};

use crate::error::{Error, Result};

const MAGIC: &str = "hpg1";

pub fn write_graph<W: Write>(g: &PercolationGraph, mut w: W) -> std::io::Result<()> {
    let p = g.profile();
    writeln!(
        w,
        "{MAGIC} N={} k={} seed={} delta={:?} C0={:?} C1={:?} C2={:?} alpha={:?}",
        p.order,
        g.depth(),
        g.seed(),
        p.delta,
        p.c0,
        p.c1,
        p.c2,
        p.alpha
    )?;
    for e in g.edges() {
        writeln!(w, "{} {} {}", e.u, e.v, e.dist)?;
    }
    w.flush()
}

pub fn save_graph(g: &PercolationGraph, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_graph(g, BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

pub fn load_graph(path: &Path) -> Result<PercolationGraph> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_graph(BufReader::new(f), path)
}

/// Parses a graph; `origin` only labels error messages.
pub fn read_graph<R: BufRead>(r: R, origin: &Path) -> Result<PercolationGraph> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(origin),
        line,
        msg,
    };
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let header = header.map_err(|e| Error::io(origin, e))?;
    let cfg = parse_header(&header).map_err(|msg| parse_err(1, msg))?;
    let h = hierperc_core::Hierarchy::new(cfg.order(), cfg.depth)?;
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io(origin, e))?;
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(n, format!("expected `<u> <v> <dist>`, got `{line}`")));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| parse_err(n, format!("bad integer `{s}`")));
        let (u, v, dist) = (num(fields[0])?, num(fields[1])?, num(fields[2])?);
        let dist = u32::try_from(dist).map_err(|_| parse_err(n, "distance out of range".into()))?;
        if u >= v {
            return Err(parse_err(n, "edge endpoints must satisfy u < v".into()));
        }
        if v >= h.size() {
            return Err(parse_err(n, format!("vertex {v} outside the ball of size {}", h.size())));
        }
        if h.dist(u, v) != dist {
            return Err(parse_err(
                n,
                format!("distance {dist} does not match endpoints (expected {})", h.dist(u, v)),
            ));
        }
        if !seen.insert((u, v)) {
            return Err(parse_err(n, format!("duplicate edge {u} {v}")));
        }
        edges.push(Edge { u, v, dist });
    }
    Ok(PercolationGraph::from_edges(cfg, edges)?)
}

fn parse_header(line: &str) -> std::result::Result<SampleConfig, String> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(format!("missing `{MAGIC}` header"));
    }
    let mut fields = std::collections::BTreeMap::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("malformed header field `{p}`"))?;
        if fields.insert(k, v).is_some() {
            return Err(format!("duplicate header field `{k}`"));
        }
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("header lacks `{k}`"));
    let real = |k: &str| -> std::result::Result<f64, String> {
        get(k)?.parse().map_err(|_| format!("bad value for `{k}`"))
    };
    let order: u32 = get("N")?.parse().map_err(|_| "bad value for `N`".to_string())?;
    let depth: u32 = get("k")?.parse().map_err(|_| "bad value for `k`".to_string())?;
    let seed: u64 = get("seed")?.parse().map_err(|_| "bad value for `seed`".to_string())?;
    let profile = ConnectivityProfile::new(
        order,
        real("delta")?,
        real("C0")?,
        real("C1")?,
        real("C2")?,
        real("alpha")?,
    )
    .map_err(|e| e.to_string())?;
    if fields.len() != 8 {
        return Err("unexpected header fields".into());
    }
    Ok(SampleConfig::new(depth, profile, seed))
}
