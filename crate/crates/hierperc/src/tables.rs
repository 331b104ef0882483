//! CSV tables. Every table has a header row, `,` separators and LF endings;
//! reals use Rust's shortest round-trip formatting.

use std::io::Write;

use hierperc_core::classify::Classification;
use hierperc_core::cluster::CutsetReport;
use hierperc_core::electrical::{NashWilliams, ResistanceProfile};
use hierperc_core::renorm::{CertificateReport, CrossValidation, DensityPopulation, RenormDiagnostics};
use hierperc_core::walk::ReturnReport;

use crate::error::Result;

fn table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(&row)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn real(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_densities<W: Write>(w: W, pops: &[DensityPopulation]) -> Result<()> {
    let rows = pops.iter().flat_map(|p| {
        p.samples
            .iter()
            .enumerate()
            .map(move |(b, &x)| vec![p.level.to_string(), b.to_string(), real(x)])
    });
    table(w, &["level", "ball_id", "density"], rows)
}

pub fn write_cutsets<W: Write>(w: W, report: &CutsetReport) -> Result<()> {
    let rows = report
        .rows
        .iter()
        .map(|r| vec![r.j.to_string(), r.size().to_string(), real(r.kappa_over_n)]);
    table(w, &["j", "size", "kappa_over_N"], rows)
}

pub fn write_renorm<W: Write>(w: W, diags: &[RenormDiagnostics]) -> Result<()> {
    let rows = diags.iter().map(|d| {
        vec![
            d.level.to_string(),
            real(d.mean),
            real(d.var),
            real(d.z_eps),
            real(d.r_t),
            d.pop_size.to_string(),
        ]
    });
    table(w, &["level", "mean", "var", "z_eps", "r_teps", "pop_size"], rows)
}

pub fn write_certificate<W: Write>(w: W, a: f64, n0: u32, c: &CertificateReport) -> Result<()> {
    let row = vec![
        real(a),
        n0.to_string(),
        real(c.min_lower_bound),
        real(c.origin_bound),
        c.levels_checked.to_string(),
        c.certified.to_string(),
    ];
    table(
        w,
        &["a", "n0", "min_lower_bound", "origin_bound", "levels_checked", "certified"],
        [row],
    )
}

pub fn write_cross_validation<W: Write>(w: W, cv: &CrossValidation) -> Result<()> {
    let rows = cv.rows.iter().map(|r| {
        vec![
            r.level.to_string(),
            real(r.direct_mean),
            real(r.direct_se),
            real(r.recursion_mean),
            real(r.recursion_se),
            real(r.mean_gap),
            real(r.var_gap),
            r.dominated.to_string(),
        ]
    });
    table(
        w,
        &[
            "level",
            "direct_mean",
            "direct_se",
            "recursion_mean",
            "recursion_se",
            "mean_gap",
            "var_gap",
            "dominated",
        ],
        rows,
    )
}

pub fn write_resistance<W: Write>(w: W, profile: Option<&ResistanceProfile>) -> Result<()> {
    let rows = profile.into_iter().flat_map(|p| &p.entries).map(|e| {
        vec![
            e.k.to_string(),
            real(e.estimate.value),
            e.estimate.method.as_str().to_string(),
            real(e.estimate.residual),
        ]
    });
    table(w, &["k", "resistance", "method", "residual"], rows)
}

pub fn write_nash_williams<W: Write>(w: W, nw: Option<&NashWilliams>) -> Result<()> {
    let rows = nw
        .into_iter()
        .flat_map(|n| &n.partial_sums)
        .map(|&(j, size, s)| vec![j.to_string(), size.to_string(), real(s)]);
    table(w, &["j", "cutset_size", "partial_nw_sum"], rows)
}

pub fn write_walks<W: Write>(w: W, report: Option<&ReturnReport>) -> Result<()> {
    let rows = report.into_iter().flat_map(|r| &r.rows).map(|r| {
        vec![
            r.replica.to_string(),
            r.outcome.as_str().to_string(),
            r.steps.to_string(),
            r.returns.to_string(),
        ]
    });
    table(w, &["replica", "outcome", "steps", "returns"], rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepLine {
    pub replica: usize,
    pub alpha: f64,
    pub k: u32,
    pub resistance: f64,
    pub nw_partial: f64,
    pub label: &'static str,
}

pub fn write_sweep<W: Write>(w: W, lines: &[SweepLine]) -> Result<()> {
    let rows = lines.iter().map(|l| {
        vec![
            l.replica.to_string(),
            real(l.alpha),
            l.k.to_string(),
            real(l.resistance),
            real(l.nw_partial),
            l.label.to_string(),
        ]
    });
    table(w, &["replica", "alpha", "k", "resistance", "nw_partial_sum", "label"], rows)
}

/// One classified series; `result` is `None` when the series was too short.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationLine {
    pub target: String,
    pub result: Option<Classification>,
}

pub fn write_classification<W: Write>(w: W, lines: &[ClassificationLine]) -> Result<()> {
    let rows = lines.iter().map(|l| match &l.result {
        Some(c) => vec![
            l.target.clone(),
            c.label.as_str().to_string(),
            "heuristic".to_string(),
            real(c.mean_ratio),
            real(c.min_increment),
            real(c.floor),
            c.increments.iter().map(|&d| real(d)).collect::<Vec<_>>().join(";"),
        ],
        None => vec![
            l.target.clone(),
            "inconclusive".to_string(),
            "heuristic".to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ],
    });
    table(
        w,
        &["target", "label", "kind", "mean_ratio", "min_increment", "floor", "increments"],
        rows,
    )
}

/// Reads a `k,resistance` series (extra columns are ignored).
pub fn read_series(path: &std::path::Path) -> Result<Vec<(u32, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| {
            crate::error::Error::Parse {
                path: path.into(),
                line: 1,
                msg: format!("missing column `{name}`"),
            }
        })
    };
    let (ki, ri) = (col("k")?, col("resistance")?);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |msg: &str| crate::error::Error::Parse {
            path: path.into(),
            line: i + 2,
            msg: msg.to_string(),
        };
        let k = rec.get(ki).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("bad `k`"))?;
        let v = rec
            .get(ri)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad("bad `resistance`"))?;
        out.push((k, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hierperc_core::walk::{ReturnRow, WalkOutcome};

    #[test]
    fn walk_table_layout() {
        let report = ReturnReport {
            rows: vec![ReturnRow {
                replica: 0,
                outcome: WalkOutcome::ReturnExhausted,
                steps: 10,
                returns: 3,
            }],
            mean_returns: 3.0,
            median_returns: 3.0,
        };
        let mut buf = Vec::new();
        write_walks(&mut buf, Some(&report)).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "replica,outcome,steps,returns\n0,return-exhausted,10,3\n"
        );
    }

    #[test]
    fn empty_tables_keep_headers() {
        let mut buf = Vec::new();
        write_resistance(&mut buf, None).unwrap();
        assert_eq!(buf, b"k,resistance,method,residual\n");
    }
}
