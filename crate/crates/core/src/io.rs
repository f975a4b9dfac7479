//! AVLG binary format, text dump, verification and run reports.
//!
//! Layout (little-endian): `"AVLG"`, `u8` version, `u64` record count,
//! `u64` start id (`u64::MAX` when absent), then per record a `u8` tag
//! (`0` terminal, `1` binary) followed by the symbol byte or two `u64`
//! child ids.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{FormatError, Result};
use crate::grammar::{Grammar, Rule};

pub const AVLG_MAGIC: &[u8; 4] = b"AVLG";
pub const AVLG_VERSION: u8 = 1;
const NO_START: u64 = u64::MAX;

pub fn serialize(g: &Grammar) -> Vec<u8> {
    let mut out = Vec::with_capacity(21 + 17 * g.len());
    out.extend_from_slice(AVLG_MAGIC);
    out.push(AVLG_VERSION);
    out.extend_from_slice(&(g.len() as u64).to_le_bytes());
    out.extend_from_slice(&g.start().map_or(NO_START, u64::from).to_le_bytes());
    for rec in g.records() {
        match rec.rule {
            Rule::Terminal(c) => out.extend_from_slice(&[0, c]),
            Rule::Binary(l, r) => {
                out.push(1);
                out.extend_from_slice(&u64::from(l).to_le_bytes());
                out.extend_from_slice(&u64::from(r).to_le_bytes());
            }
        }
    }
    out
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take(&mut self, k: usize) -> std::result::Result<&[u8], FormatError> {
        if self.0.len() < k {
            return Err(FormatError::UnexpectedEnd);
        }
        let (head, tail) = self.0.split_at(k);
        self.0 = tail;
        Ok(head)
    }

    fn u8(&mut self) -> std::result::Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> std::result::Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Parses and re-validates a grammar: ids must point backwards (which
/// rules out cycles) and every binary rule must satisfy the AVL condition.
pub fn deserialize(bytes: &[u8]) -> Result<Grammar> {
    let mut cur = Cursor(bytes);
    if cur.take(4).map_err(|_| FormatError::BadMagic { expected: "AVLG" })? != AVLG_MAGIC {
        return Err(FormatError::BadMagic { expected: "AVLG" }.into());
    }
    let version = cur.u8()?;
    if version != AVLG_VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let count = cur.u64()?;
    let start = cur.u64()?;
    if count > u64::from(u32::MAX) {
        return Err(FormatError::UnexpectedEnd.into());
    }
    let mut g = Grammar::new();
    for record in 0..count {
        match cur.u8()? {
            0 => {
                let c = cur.u8()?;
                g.push_terminal(c);
            }
            1 => {
                let (l, r) = (cur.u64()?, cur.u64()?);
                for child in [l, r] {
                    if child >= count {
                        return Err(FormatError::DanglingId { record, child }.into());
                    }
                    if child >= record {
                        return Err(FormatError::AcyclicityViolated { record, child }.into());
                    }
                }
                let (l, r) = (l as u32, r as u32);
                if g.height(l).abs_diff(g.height(r)) > 1 {
                    return Err(FormatError::AvlViolation { record }.into());
                }
                g.push_binary(l, r);
            }
            tag => return Err(FormatError::BadTag { record, tag }.into()),
        }
    }
    if !cur.0.is_empty() {
        return Err(FormatError::TrailingBytes.into());
    }
    match start {
        NO_START => g.set_start(None),
        s if s < count => g.set_start(Some(s as u32)),
        s => return Err(FormatError::BadStart(s).into()),
    }
    Ok(g)
}

pub fn write_avlg(g: &Grammar, mut w: impl Write) -> Result<()> {
    w.write_all(&serialize(g))?;
    Ok(())
}

pub fn read_avlg(mut r: impl Read) -> Result<Grammar> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    deserialize(&bytes)
}

/// One rule per line, ids ascending: `A_i -> c` or `A_i -> A_j A_k`.
/// Bytes outside printable ASCII are written as `\xNN`.
pub fn dump_text(g: &Grammar) -> String {
    let mut out = String::new();
    if let Some(s) = g.start() {
        let _ = writeln!(out, "# start A_{s}");
    }
    for (id, rec) in g.records().enumerate() {
        let _ = match rec.rule {
            Rule::Terminal(c) if c.is_ascii_graphic() => writeln!(out, "A_{id} -> {}", c as char),
            Rule::Terminal(c) => writeln!(out, "A_{id} -> \\x{c:02x}"),
            Rule::Binary(l, r) => writeln!(out, "A_{id} -> A_{l} A_{r}"),
        };
    }
    out
}

/// Compares `exp(start)` with `text` symbol by symbol, stopping at the
/// first difference.
pub fn verify_against_text(g: &Grammar, start: u32, text: &[u8]) -> bool {
    if g.get(start).is_err() || g.explen(start) != text.len() as u64 {
        return false;
    }
    let mut at = 0;
    g.walk(start, |c| {
        let ok = text[at] == c;
        at += 1;
        ok
    })
}

/// Statistics of one conversion run, in a fixed column order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub algo: String,
    pub n: u64,
    pub f: u64,
    /// LZ77 phrase count, when the input is a greedy parse.
    pub z: Option<u64>,
    pub size_pre_flatten: u64,
    pub size: u64,
    pub size_per_z: Option<f64>,
    pub records: u64,
    pub merges_attempted: u64,
    pub merges_avoided: u64,
    pub avoided_percent: f64,
    pub peak_records: u64,
    pub peak_live_roots: u64,
    pub wall_ms: f64,
    pub peak_mem_bytes: u64,
}

impl RunReport {
    pub fn avoided_percent(attempted: u64, avoided: u64) -> f64 {
        if attempted == 0 {
            0.0
        } else {
            avoided as f64 / attempted as f64 * 100.0
        }
    }

    /// Fills `avoided_percent` and `size_per_z` from the raw counters.
    pub fn finish(mut self) -> Self {
        self.avoided_percent = Self::avoided_percent(self.merges_attempted, self.merges_avoided);
        self.size_per_z = self.z.filter(|&z| z > 0).map(|z| self.size as f64 / z as f64);
        self
    }

    pub fn csv_header() -> String {
        let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
        w.serialize(RunReport::default()).expect("in-memory csv");
        let bytes = w.into_inner().expect("in-memory csv");
        String::from_utf8(bytes).expect("utf-8").lines().next().unwrap_or_default().to_string()
    }

    pub fn csv_row(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.serialize(self).expect("in-memory csv");
        let bytes = w.into_inner().expect("in-memory csv");
        String::from_utf8(bytes).expect("utf-8").trim_end().to_string()
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}
