//! Exact greedy LZ77 with closest sources.
//!
//! Suffix array (divsufsort) + LCP (Kasai). For a phrase starting at text
//! position `i` with suffix rank `r`, the longest previous factor is the
//! larger LCP with the nearest ranks left/right of `r` whose suffix starts
//! before `i`. The source is the largest position `< i` inside the LCP
//! interval of that length around `r`, found with a max tree over ranks
//! that holds exactly the positions already passed.

use super::{Factorization, Phrase};
use crate::error::{Error, Result};

const BLOCK: usize = 64;

/// Range-minimum over a `u32` array with threshold searches.
///
/// Block minima are indexed by a sparse table, so every query scans at most
/// two partial blocks plus `O(log n)` table probes.
struct BlockMin {
    values: Vec<u32>,
    // sparse[k][b] = min of block minima b .. b + 2^k
    sparse: Vec<Vec<u32>>,
}

impl BlockMin {
    fn new(values: Vec<u32>) -> Self {
        let mins: Vec<u32> = values
            .chunks(BLOCK)
            .map(|c| c.iter().copied().min().unwrap_or(u32::MAX))
            .collect();
        let mut sparse = vec![mins];
        let mut width = 1;
        while 2 * width <= sparse[0].len() {
            let prev = sparse.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - width)
                .map(|b| prev[b].min(prev[b + width]))
                .collect();
            sparse.push(next);
            width *= 2;
        }
        BlockMin { values, sparse }
    }

    fn blocks_min(&self, lo: usize, hi: usize) -> u32 {
        // inclusive block range
        let k = usize::BITS as usize - 1 - (hi - lo + 1).leading_zeros() as usize;
        self.sparse[k][lo].min(self.sparse[k][hi + 1 - (1 << k)])
    }

    /// Minimum of `values[lo..=hi]`.
    fn min(&self, lo: usize, hi: usize) -> u32 {
        let (bl, bh) = (lo / BLOCK, hi / BLOCK);
        if bh <= bl + 1 {
            return self.values[lo..=hi].iter().copied().min().unwrap();
        }
        let head = self.values[lo..(bl + 1) * BLOCK].iter().copied().min().unwrap();
        let tail = self.values[bh * BLOCK..=hi].iter().copied().min().unwrap();
        head.min(tail).min(self.blocks_min(bl + 1, bh - 1))
    }

    /// Largest `k <= pos` with `values[k] < thr`.
    fn prev_less(&self, pos: usize, thr: u32) -> Option<usize> {
        let b = pos / BLOCK;
        if let Some(k) = (b * BLOCK..=pos).rev().find(|&k| self.values[k] < thr) {
            return Some(k);
        }
        if b == 0 || self.blocks_min(0, b - 1) >= thr {
            return None;
        }
        // largest block lo with min(blocks lo..b-1) < thr
        let (mut lo, mut hi) = (0, b - 1);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.blocks_min(mid, b - 1) < thr {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let end = ((lo + 1) * BLOCK).min(self.values.len());
        (lo * BLOCK..end).rev().find(|&k| self.values[k] < thr)
    }

    /// Smallest `k >= pos` with `values[k] < thr`.
    fn next_less(&self, pos: usize, thr: u32) -> Option<usize> {
        let n = self.values.len();
        if pos >= n {
            return None;
        }
        let b = pos / BLOCK;
        let end = ((b + 1) * BLOCK).min(n);
        if let Some(k) = (pos..end).find(|&k| self.values[k] < thr) {
            return Some(k);
        }
        let last = self.sparse[0].len() - 1;
        if b == last || self.blocks_min(b + 1, last) >= thr {
            return None;
        }
        let (mut lo, mut hi) = (b + 1, last);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.blocks_min(b + 1, mid) < thr {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let end = ((lo + 1) * BLOCK).min(n);
        (lo * BLOCK..end).find(|&k| self.values[k] < thr)
    }
}

/// Max over rank ranges of the text positions inserted so far.
///
/// Positions are inserted in increasing order, so an update just overwrites
/// the leaf-to-root path.
struct PassedPositions {
    size: usize,
    // 0 = empty, otherwise position + 1
    tree: Vec<u32>,
}

impl PassedPositions {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two();
        PassedPositions { size, tree: vec![0; 2 * size] }
    }

    fn insert(&mut self, rank: usize, pos: u32) {
        let mut k = rank + self.size;
        while k > 0 {
            self.tree[k] = pos + 1;
            k /= 2;
        }
    }

    /// Largest inserted position with rank in `lo..=hi`.
    fn max(&self, lo: usize, hi: usize) -> Option<u32> {
        let (mut l, mut r) = (lo + self.size, hi + self.size + 1);
        let mut best = 0;
        while l < r {
            if l & 1 == 1 {
                best = best.max(self.tree[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                best = best.max(self.tree[r]);
            }
            l /= 2;
            r /= 2;
        }
        best.checked_sub(1)
    }
}

fn suffix_array(text: &[u8]) -> Vec<u32> {
    let mut sa = vec![0i32; text.len()];
    divsufsort::sort_in_place(text, &mut sa);
    sa.into_iter().map(|x| x as u32).collect()
}

/// `lcp[k]` = longest common prefix of suffixes `sa[k-1]` and `sa[k]`; `lcp[0] = 0`.
fn kasai(text: &[u8], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Greedy LZ77 parse; self-overlapping sources allowed, ties go to the
/// largest (closest) source position.
pub fn lz77_parse(text: &[u8]) -> Result<Factorization> {
    let n = text.len();
    if n == 0 {
        return Err(Error::EmptyText);
    }
    if n > i32::MAX as usize {
        return Err(Error::TextTooLong(n));
    }
    let sa = suffix_array(text);
    let mut rank = vec![0u32; n];
    for (r, &s) in sa.iter().enumerate() {
        rank[s as usize] = r as u32;
    }
    let lcp = BlockMin::new(kasai(text, &sa, &rank));
    let sa = BlockMin::new(sa);
    let mut passed = PassedPositions::new(n);
    let mut inserted = 0usize;

    let mut phrases = Vec::new();
    let mut i = 0usize;
    while i < n {
        while inserted < i {
            passed.insert(rank[inserted] as usize, inserted as u32);
            inserted += 1;
        }
        let r = rank[i] as usize;
        let thr = i as u32;
        let mut len = 0u32;
        if r > 0 {
            if let Some(k) = sa.prev_less(r - 1, thr) {
                len = len.max(lcp.min(k + 1, r));
            }
        }
        if let Some(k) = sa.next_less(r + 1, thr) {
            len = len.max(lcp.min(r + 1, k));
        }
        if len == 0 {
            phrases.push(Phrase::Literal(text[i]));
            i += 1;
            continue;
        }
        // lcp[0] == 0 < len, so the left boundary always exists.
        let lb = lcp.prev_less(r, len).unwrap_or(0);
        let rb = lcp.next_less(r + 1, len).map_or(n - 1, |k| k - 1);
        let src = u64::from(passed.max(lb, rb).expect("a previous occurrence exists"));
        debug_assert!(src < i as u64);
        phrases.push(Phrase::Copy { src: src + 1, len: u64::from(len) });
        i += len as usize;
    }
    Ok(Factorization::new(phrases))
}
