use super::BlockedArray;
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

/// Expansion lengths at or above this value go to the overflow table,
/// and only such nonterminals keep a stored fingerprint.
pub const LONG_THRESHOLD: u64 = 255;

/// Per-nonterminal side data packed by expansion length.
///
/// One byte per nonterminal holds short lengths; `255` marks an entry in
/// the id-sorted overflow list. Fingerprints are kept only for long
/// nonterminals, and only when the owner supplies them.
#[derive(Debug, Clone, Default)]
pub struct SideTables {
    explen_byte: BlockedArray<u8>,
    explen_overflow: BlockedArray<(u32, u64)>,
    fp_long: BlockedArray<(u32, u64)>,
}

impl SideTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.explen_byte.len()
    }

    pub fn is_empty(&self) -> bool {
        self.explen_byte.is_empty()
    }

    pub fn overflow_len(&self) -> usize {
        self.explen_overflow.len()
    }

    pub fn fp_long_len(&self) -> usize {
        self.fp_long.len()
    }

    pub fn heap_bytes(&self) -> usize {
        self.explen_byte.heap_bytes() + self.explen_overflow.heap_bytes() + self.fp_long.heap_bytes()
    }

    /// Appends the data of nonterminal `len()`.
    pub fn push(&mut self, len: u64, fp: Option<Fingerprint>) {
        let id = self.explen_byte.len() as u32;
        if len >= LONG_THRESHOLD {
            self.explen_byte.push(u8::MAX);
            self.explen_overflow.push((id, len));
            if let Some(fp) = fp {
                self.fp_long.push((id, fp.0));
            }
        } else {
            self.explen_byte.push(len as u8);
        }
    }

    fn search(table: &BlockedArray<(u32, u64)>, id: u32) -> Option<u64> {
        let k = table.partition_point(|&(i, _)| i < id);
        table.get(k).filter(|&&(i, _)| i == id).map(|&(_, v)| v)
    }

    /// Expansion length of `id`. Panics on unknown ids.
    #[inline]
    pub fn explen(&self, id: u32) -> u64 {
        match self.explen_byte[id as usize] {
            u8::MAX => Self::search(&self.explen_overflow, id).expect("overflow entry"),
            b => u64::from(b),
        }
    }

    pub fn explen_get(&self, id: u32) -> Result<u64> {
        if id as usize >= self.len() {
            return Err(Error::UnknownId(id));
        }
        Ok(self.explen(id))
    }

    pub fn fp_long_get(&self, id: u32) -> Result<Option<Fingerprint>> {
        if id as usize >= self.len() {
            return Err(Error::UnknownId(id));
        }
        Ok(Self::search(&self.fp_long, id).map(Fingerprint))
    }
}
