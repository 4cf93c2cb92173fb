//! Benchmark harness: solves every `.stp` file of a directory and tabulates
//! costs, ratios and bound-check outcomes.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::solve::{solve, RunConfig};
use crate::stp::parse_stp_file;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub vertices: Option<usize>,
    pub edges: Option<usize>,
    pub terminals: Option<usize>,
    pub k: Option<usize>,
    pub mst: Option<i64>,
    pub cost: Option<i64>,
    pub opt: Option<i64>,
    pub ratio_opt: Option<f64>,
    pub ratio_mst: Option<f64>,
    pub bounds_ok: Option<bool>,
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(name: String, error: String) -> Self {
        BenchRow {
            name,
            vertices: None,
            edges: None,
            terminals: None,
            k: None,
            mst: None,
            cost: None,
            opt: None,
            ratio_opt: None,
            ratio_mst: None,
            bounds_ok: None,
            runtime_ms: None,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// One row per file, sorted by name.
    pub rows: Vec<BenchRow>,
    pub failures: usize,
}

fn ratio(a: i64, b: i64) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

fn run_file(path: &Path, config: &RunConfig) -> BenchRow {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("?")
        .to_string();
    let result = parse_stp_file(path).and_then(|inst| solve(&inst, config).map(|r| (inst, r)));
    match result {
        Ok((inst, r)) => BenchRow {
            name: if inst.name().is_empty() {
                stem
            } else {
                inst.name().to_string()
            },
            vertices: Some(r.vertices),
            edges: Some(r.edges),
            terminals: Some(r.terminals),
            k: Some(r.k),
            mst: Some(r.mst),
            cost: Some(r.cost),
            opt: r.opt,
            ratio_opt: r.opt.and_then(|o| ratio(r.cost, o)),
            ratio_mst: ratio(r.cost, r.mst),
            bounds_ok: Some(r.all_checks_pass()),
            runtime_ms: Some(r.wall_time_ms),
            error: None,
        },
        Err(e) => {
            log::warn!("{}: {e}", path.display());
            BenchRow::failed(stem, e.to_string())
        }
    }
}

/// Solves every `.stp` file in `dir` (in parallel); per-file failures become
/// rows carrying the error.
pub fn bench(dir: &Path, config: &RunConfig) -> Result<BenchReport> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("stp"))
        })
        .collect();
    files.sort();
    let mut rows: Vec<BenchRow> = files.par_iter().map(|p| run_file(p, config)).collect();
    rows.sort_by(|a, b| a.name.cmp(&b.name));
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(BenchReport { rows, failures })
}

fn summary(name: &str, rows: &[BenchRow], fold: impl Fn(&[f64]) -> f64) -> BenchRow {
    let column = |f: fn(&BenchRow) -> Option<f64>| -> Option<f64> {
        let v: Vec<f64> = rows.iter().filter_map(f).collect();
        (!v.is_empty()).then(|| fold(&v))
    };
    let mut row = BenchRow::failed(name.to_string(), String::new());
    row.error = None;
    row.ratio_opt = column(|r| r.ratio_opt);
    row.ratio_mst = column(|r| r.ratio_mst);
    row
}

impl BenchReport {
    /// Summary rows (maximum and mean ratios) follow the instance rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| crate::SteinerError::Io(e.to_string());
        if self.rows.is_empty() {
            w.write_record([
                "name",
                "vertices",
                "edges",
                "terminals",
                "k",
                "mst",
                "cost",
                "opt",
                "ratio_opt",
                "ratio_mst",
                "bounds_ok",
                "runtime_ms",
                "error",
            ])
            .map_err(io)?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(io)?;
        }
        if !self.rows.is_empty() {
            let max = summary("SUMMARY_MAX", &self.rows, |v| {
                v.iter().copied().fold(f64::MIN, f64::max)
            });
            let mean = summary("SUMMARY_MEAN", &self.rows, |v| {
                v.iter().sum::<f64>() / v.len() as f64
            });
            w.serialize(max).map_err(io)?;
            w.serialize(mean).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| crate::SteinerError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
