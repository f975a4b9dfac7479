//! LZ77 and LZ77-like factorizations.
//!
//! Positions in this module are 1-based, so a copy phrase `(src, len)`
//! starting at text position `i` refers to `T[src .. src + len)` with
//! `1 <= src < i`. Literals are written as `(symbol, 0)` on disk.

mod format;
mod parse;

use std::fmt;

pub use format::{read_lz7f, write_lz7f, LZ7F_MAGIC, LZ7F_VERSION};
pub use parse::lz77_parse;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phrase {
    Literal(u8),
    Copy { src: u64, len: u64 },
}

impl Phrase {
    /// Number of text symbols the phrase decodes to.
    pub fn len(&self) -> u64 {
        match *self {
            Phrase::Literal(_) => 1,
            Phrase::Copy { len, .. } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when a copy starting at text position `start` overlaps its own source.
    pub fn is_self_referential(&self, start: u64) -> bool {
        match *self {
            Phrase::Literal(_) => false,
            Phrase::Copy { src, len } => src + len > start,
        }
    }

    /// The `(p, l)` pair used by the on-disk encoding.
    pub fn as_pair(&self) -> (u64, u64) {
        match *self {
            Phrase::Literal(c) => (u64::from(c), 0),
            Phrase::Copy { src, len } => (src, len),
        }
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phrase::Literal(c) if c.is_ascii_graphic() => write!(f, "({},0)", c as char),
            Phrase::Literal(c) => write!(f, "(#{c},0)"),
            Phrase::Copy { src, len } => write!(f, "({src},{len})"),
        }
    }
}

/// A factorization `T = F_1 ... F_f` together with the decoded length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    phrases: Vec<Phrase>,
    n: u64,
}

impl Factorization {
    pub fn new(phrases: Vec<Phrase>) -> Self {
        let n = phrases.iter().map(Phrase::len).sum();
        Factorization { phrases, n }
    }

    /// Keeps a declared length that may disagree with the phrases;
    /// `validate` reports the mismatch.
    pub fn with_declared_len(phrases: Vec<Phrase>, n: u64) -> Self {
        Factorization { phrases, n }
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn f(&self) -> usize {
        self.phrases.len()
    }

    /// Iterates `(start, phrase)` with 1-based start positions.
    pub fn positioned(&self) -> impl Iterator<Item = (u64, &Phrase)> + '_ {
        self.phrases.iter().scan(1u64, |pos, ph| {
            let start = *pos;
            *pos += ph.len();
            Some((start, ph))
        })
    }
}

/// Why a phrase was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    ZeroSource,
    SourceBeyondPrefix,
    EmptyCopy,
    LengthMismatch { declared: u64, actual: u64 },
    TextLength { text: u64, decoded: u64 },
    LiteralMismatch,
    SourceMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroSource => f.write_str("source position 0"),
            Violation::SourceBeyondPrefix => f.write_str("source beyond written prefix"),
            Violation::EmptyCopy => f.write_str("zero-length copy"),
            Violation::LengthMismatch { declared, actual } => {
                write!(f, "declared length {declared} but phrases cover {actual}")
            }
            Violation::TextLength { text, decoded } => {
                write!(f, "text has {text} symbols but phrases cover {decoded}")
            }
            Violation::LiteralMismatch => f.write_str("literal differs from text"),
            Violation::SourceMismatch => f.write_str("copy does not match its source"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// First offending phrase index (0-based) and the rule it broke.
    /// Whole-factorization length problems report index `f`.
    pub first_bad: Option<(usize, Violation)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.first_bad.is_none()
    }

    pub fn into_result(self) -> Result<()> {
        match self.first_bad {
            None => Ok(()),
            Some((index, reason)) => Err(Error::InvalidFactorization { index, reason }),
        }
    }
}

fn check_structure(start: u64, phrase: &Phrase) -> Option<Violation> {
    match *phrase {
        Phrase::Literal(_) => None,
        Phrase::Copy { len: 0, .. } => Some(Violation::EmptyCopy),
        Phrase::Copy { src: 0, .. } => Some(Violation::ZeroSource),
        Phrase::Copy { src, .. } if src >= start => Some(Violation::SourceBeyondPrefix),
        Phrase::Copy { .. } => None,
    }
}

/// Structural checks, plus a symbol-level comparison when `text` is given.
pub fn validate(fact: &Factorization, text: Option<&[u8]>) -> ValidationReport {
    let mut total = 0u64;
    for (index, (start, phrase)) in fact.positioned().enumerate() {
        if let Some(v) = check_structure(start, phrase) {
            return ValidationReport { first_bad: Some((index, v)) };
        }
        if let Some(text) = text {
            let s = (start - 1) as usize;
            let ok = match *phrase {
                Phrase::Literal(c) => text.get(s) == Some(&c),
                Phrase::Copy { src, len } => {
                    let (src, len) = ((src - 1) as usize, len as usize);
                    s + len <= text.len() && (0..len).all(|t| text[src + t] == text[s + t])
                }
            };
            if !ok {
                let v = match phrase {
                    Phrase::Literal(_) => Violation::LiteralMismatch,
                    Phrase::Copy { .. } => Violation::SourceMismatch,
                };
                return ValidationReport { first_bad: Some((index, v)) };
            }
        }
        total += phrase.len();
    }
    let f = fact.f();
    if total != fact.n() {
        let v = Violation::LengthMismatch { declared: fact.n(), actual: total };
        return ValidationReport { first_bad: Some((f, v)) };
    }
    if let Some(text) = text {
        if text.len() as u64 != total {
            let v = Violation::TextLength { text: text.len() as u64, decoded: total };
            return ValidationReport { first_bad: Some((f, v)) };
        }
    }
    ValidationReport { first_bad: None }
}

/// Decodes left to right; overlapping copies are expanded symbol by symbol.
pub fn lz_decode(fact: &Factorization) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(fact.n().min(1 << 30) as usize);
    for (index, phrase) in fact.phrases().iter().enumerate() {
        let start = out.len() as u64 + 1;
        if let Some(reason) = check_structure(start, phrase) {
            return Err(Error::InvalidFactorization { index, reason });
        }
        match *phrase {
            Phrase::Literal(c) => out.push(c),
            Phrase::Copy { src, len } => {
                let from = (src - 1) as usize;
                let len = len as usize;
                if from + len <= out.len() {
                    out.extend_from_within(from..from + len);
                } else {
                    out.reserve(len);
                    for t in 0..len {
                        let c = out[from + t];
                        out.push(c);
                    }
                }
            }
        }
    }
    if out.len() as u64 != fact.n() {
        let reason = Violation::LengthMismatch { declared: fact.n(), actual: out.len() as u64 };
        return Err(Error::InvalidFactorization { index: fact.f(), reason });
    }
    Ok(out)
}

/// Splits a copy at 1-based position `start` into non-overlapping pieces.
///
/// A self-referential copy with period `d = start - src` is emitted as
/// sources `[src .. src + c)` of lengths `d, 2d, 4d, ...` (the last one
/// truncated), each fully inside the prefix written before it.
pub fn non_overlapping_pieces(start: u64, src: u64, len: u64) -> Vec<(u64, u64)> {
    let period = start - src;
    let mut pieces = Vec::new();
    let mut done = 0u64;
    while done < len {
        let available = period + done;
        let c = (len - done).min(available);
        pieces.push((src, c));
        done += c;
    }
    pieces
}
