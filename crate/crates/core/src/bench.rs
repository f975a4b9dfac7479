//! Per-file size comparison of the converters and Re-Pair.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::basic::convert_basic;
use crate::error::Result;
use crate::lazy::convert_lazy;
use crate::lz::lz77_parse;
use crate::repair::repair_compress;

/// Dedup sampling probability used for the headline lazy column.
pub const BENCH_P: f64 = 0.125;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchRow {
    pub file: String,
    pub n: u64,
    pub z: u64,
    pub basic: u64,
    pub basic_pruned: u64,
    pub lazy: u64,
    pub lazy_p0: u64,
    pub repair: u64,
    pub basic_per_z: f64,
    pub basic_pruned_per_z: f64,
    pub lazy_per_z: f64,
    pub repair_per_z: f64,
    pub lazy_per_repair: f64,
    pub avoided_percent: f64,
    pub parse_ms: f64,
    pub basic_ms: f64,
    pub lazy_ms: f64,
    pub repair_ms: f64,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64() * 1e3))
}

/// All measurements for one text. `kr_seed` drives the lazy runs.
pub fn bench_text(name: &str, text: &[u8], kr_seed: u64) -> Result<BenchRow> {
    let (fact, parse_ms) = timed(|| lz77_parse(text))?;
    let (basic, basic_ms) = timed(|| convert_basic(&fact))?;
    let pruned = basic.pruned()?;
    let ((_, _, lazy), lazy_ms) = timed(|| convert_lazy(&fact, BENCH_P, kr_seed, false))?;
    let (_, _, lazy0) = convert_lazy(&fact, 0.0, kr_seed, false)?;
    let (repair, repair_ms) = timed(|| repair_compress(text))?;
    let z = fact.f() as u64;
    let per_z = |s: u64| s as f64 / z as f64;
    Ok(BenchRow {
        file: name.to_string(),
        n: text.len() as u64,
        z,
        basic: basic.size(),
        basic_pruned: pruned.size(),
        lazy: lazy.size,
        lazy_p0: lazy0.size,
        repair: repair.size(),
        basic_per_z: per_z(basic.size()),
        basic_pruned_per_z: per_z(pruned.size()),
        lazy_per_z: per_z(lazy.size),
        repair_per_z: per_z(repair.size()),
        lazy_per_repair: lazy.size as f64 / repair.size() as f64,
        avoided_percent: lazy.avoided_percent(),
        parse_ms,
        basic_ms,
        lazy_ms,
        repair_ms,
    })
}

/// Regular files of `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    Ok(files)
}

/// Writes rows as CSV, header first. An empty slice gives a header only.
pub fn write_csv(rows: &[BenchRow], mut w: impl std::io::Write) -> std::io::Result<()> {
    if rows.is_empty() {
        return writeln!(w, "{}", csv_header());
    }
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row).map_err(std::io::Error::other)?;
    }
    out.flush()
}

/// Header line of the bench CSV.
pub fn csv_header() -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(BenchRow::default()).expect("in-memory csv");
    let bytes = w.into_inner().expect("in-memory csv");
    String::from_utf8(bytes).expect("utf-8").lines().next().unwrap_or_default().to_string()
}
