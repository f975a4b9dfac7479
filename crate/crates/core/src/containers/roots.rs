//! The roots sequence `(ℓ_1, R_1), ..., (ℓ_m, R_m)` of the lazy converter.
//!
//! Entries live in a [`BlockedArray`] and are only appended. Range deletion
//! marks entries as deleted and writes the replacement into the slot of the
//! last deleted entry, so the physical `ℓ` column stays strictly increasing
//! and binary search can run over deleted entries too. A deleted entry always
//! lies inside the range of the next live entry after it.
//!
//! Accesses to deleted entries are counted; once the counter reaches the
//! physical size, the next [`RootsSequence::range`] call compacts the array.
//! Slot indices returned by queries stay valid until the next `range` or
//! [`RootsSequence::collect`] call.

use super::BlockedArray;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Entry {
    ell: u64,
    id: u32,
    deleted: bool,
}

/// Garbage-collection counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct RootsStats {
    pub gc_runs: u64,
    /// Live entries written during compaction, summed over all runs.
    pub gc_moved: u64,
    pub deleted_accesses: u64,
}

/// A live root located by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootSpan {
    pub slot: usize,
    pub id: u32,
    /// Position of the root's first symbol minus one (the previous `ℓ`).
    pub start: u64,
    pub end: u64,
}

#[derive(Debug, Clone, Default)]
pub struct RootsSequence {
    entries: BlockedArray<Entry>,
    live: usize,
    pending: u64,
    stats: RootsStats,
}

impl RootsSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn live_len(&self) -> usize {
        self.live
    }

    pub fn physical_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn stats(&self) -> RootsStats {
        self.stats
    }

    pub fn heap_bytes(&self) -> usize {
        self.entries.heap_bytes()
    }

    /// Length of the covered prefix (`ℓ_m`, or 0 when empty).
    pub fn end(&self) -> u64 {
        // the last physical entry is never deleted
        self.entries.last().map_or(0, |e| e.ell)
    }

    pub fn push(&mut self, ell: u64, id: u32) -> Result<()> {
        let last = self.end();
        if ell <= last {
            return Err(Error::NonMonotoneRoots { ell, last });
        }
        self.entries.push(Entry { ell, id, deleted: false });
        self.live += 1;
        Ok(())
    }

    /// `(ℓ, id)` of a live slot.
    pub fn get(&self, slot: usize) -> (u64, u32) {
        let e = self.entries[slot];
        debug_assert!(!e.deleted);
        (e.ell, e.id)
    }

    pub fn iter_live(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.entries.iter().filter(|e| !e.deleted).map(|e| (e.ell, e.id))
    }

    fn touch(&mut self, slot: usize) -> Entry {
        let e = self.entries[slot];
        if e.deleted {
            self.pending += 1;
            self.stats.deleted_accesses += 1;
        }
        e
    }

    fn lower_bound(&mut self, pos: u64) -> usize {
        let (mut lo, mut hi) = (0, self.entries.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.touch(mid).ell < pos {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn first_live_from(&mut self, mut slot: usize) -> Option<usize> {
        while slot < self.entries.len() {
            if !self.touch(slot).deleted {
                return Some(slot);
            }
            slot += 1;
        }
        None
    }

    fn prev_live_before(&mut self, slot: usize) -> Option<usize> {
        (0..slot).rev().find(|&s| !self.touch(s).deleted)
    }

    fn check_range(&self, i: u64, j: u64) -> Result<()> {
        if i == 0 || i > j || j > self.end() {
            return Err(Error::RangeOutOfBounds { i, j, len: self.end() });
        }
        Ok(())
    }

    /// Slots `x, y` of the first and last live roots whose expansions lie
    /// entirely inside `[i..j]`; `None` when there are none (`x > y`).
    ///
    /// `x = min{t : ℓ_{t-1} >= i-1}` and `y = max{t : ℓ_t <= j}`, `ℓ_0 = 0`.
    pub fn range(&mut self, i: u64, j: u64) -> Result<Option<(usize, usize)>> {
        self.check_range(i, j)?;
        if self.pending >= self.entries.len() as u64 {
            self.collect();
        }
        let x = if i == 1 {
            self.first_live_from(0)
        } else {
            let s = self.lower_bound(i - 1);
            // the root holding position i-1 (or ending there) is not enclosed
            match self.first_live_from(s) {
                Some(u) => self.first_live_from(u + 1),
                None => None,
            }
        };
        let s = self.lower_bound(j);
        let u = self.first_live_from(s).expect("j <= end, last entry is live");
        let y = if self.entries[u].ell == j { Some(u) } else { self.prev_live_before(u) };
        Ok(match (x, y) {
            (Some(x), Some(y)) if x <= y => Some((x, y)),
            _ => None,
        })
    }

    /// The live root whose expansion covers position `pos` (1-based).
    pub fn locate(&mut self, pos: u64) -> Result<RootSpan> {
        self.check_range(pos, pos)?;
        let s = self.lower_bound(pos);
        let slot = self.first_live_from(s).expect("pos <= end, last entry is live");
        let start = match self.prev_live_before(slot) {
            Some(p) => self.entries[p].ell,
            None => 0,
        };
        let e = self.entries[slot];
        Ok(RootSpan { slot, id: e.id, start, end: e.ell })
    }

    /// Live `(slot, id)` pairs with `x <= slot <= y`.
    pub fn live_between(&mut self, x: usize, y: usize) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for slot in x..=y {
            let e = self.touch(slot);
            if !e.deleted {
                out.push((slot, e.id));
            }
        }
        out
    }

    /// Deletes live slots `x..=y` and stores `id` in slot `y`, keeping `ℓ_y`.
    pub fn replace_range(&mut self, x: usize, y: usize, id: u32) {
        assert!(x <= y && y < self.entries.len(), "bad slot range {x}..={y}");
        assert!(!self.entries[x].deleted && !self.entries[y].deleted, "slots must be live");
        let mut removed = 0;
        for slot in x..y {
            let e = &mut self.entries[slot];
            if !e.deleted {
                e.deleted = true;
                removed += 1;
            }
        }
        self.entries[y].id = id;
        self.live -= removed;
    }

    /// Compacts live entries to the front and resets the access counter.
    pub fn collect(&mut self) {
        self.pending = 0;
        if self.live == self.entries.len() {
            return;
        }
        self.stats.gc_runs += 1;
        self.stats.gc_moved += self.live as u64;
        self.entries.retain(|e| !e.deleted);
        debug_assert_eq!(self.entries.len(), self.live);
    }
}
