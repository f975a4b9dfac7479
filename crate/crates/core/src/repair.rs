//! Plain Re-Pair, used as the size baseline.
//!
//! Symbols below 256 are bytes; rule `k` is symbol `256 + k`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Rules plus the final sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RePair {
    pub rules: Vec<(u32, u32)>,
    pub sequence: Vec<u32>,
}

impl RePair {
    /// Total right-hand-side length: two per rule plus the final sequence.
    pub fn size(&self) -> u64 {
        2 * self.rules.len() as u64 + self.sequence.len() as u64
    }

    pub fn decode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for &s in self.sequence.iter().rev() {
            stack.push(s);
        }
        while let Some(s) = stack.pop() {
            if s < 256 {
                out.push(s as u8);
            } else {
                let (l, r) = self.rules[(s - 256) as usize];
                stack.push(r);
                stack.push(l);
            }
        }
        out
    }
}

/// `repair_size`.
pub fn repair_size(result: &RePair) -> u64 {
    result.size()
}

type Pair = (u32, u32);

struct State {
    seq: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    counts: HashMap<Pair, u32>,
    // candidate positions, possibly stale
    positions: HashMap<Pair, Vec<u32>>,
    queue: BTreeSet<(Reverse<u32>, Pair)>,
    skipped: HashSet<Pair>,
}

impl State {
    fn pair_at(&self, p: u32) -> Option<Pair> {
        let q = self.next[p as usize];
        (q != NONE).then(|| (self.seq[p as usize], self.seq[q as usize]))
    }

    fn adjust(&mut self, pair: Pair, delta: i32, pos: Option<u32>) {
        let count = self.counts.entry(pair).or_insert(0);
        let old = *count;
        *count = old.checked_add_signed(delta).expect("pair count underflow");
        let new = *count;
        if new == 0 {
            self.counts.remove(&pair);
        }
        if let Some(p) = pos {
            self.positions.entry(pair).or_default().push(p);
        }
        if old >= 2 {
            self.queue.remove(&(Reverse(old), pair));
        }
        if delta > 0 {
            self.skipped.remove(&pair);
        }
        if new >= 2 && !self.skipped.contains(&pair) {
            self.queue.insert((Reverse(new), pair));
        }
    }

    // Left-to-right non-overlapping live occurrences of `pair`.
    fn occurrences(&mut self, pair: Pair) -> Vec<u32> {
        let mut cand = self.positions.remove(&pair).unwrap_or_default();
        cand.sort_unstable();
        cand.dedup();
        let mut out: Vec<u32> = Vec::with_capacity(cand.len());
        for p in cand {
            if self.pair_at(p) != Some(pair) || self.seq[p as usize] == NONE {
                continue;
            }
            if let Some(&last) = out.last() {
                if self.next[last as usize] == p {
                    continue;
                }
            }
            out.push(p);
        }
        out
    }

    fn replace(&mut self, p: u32, pair: Pair, sym: u32) {
        let q = self.next[p as usize];
        let l = self.prev[p as usize];
        let r = self.next[q as usize];
        if l != NONE {
            self.adjust((self.seq[l as usize], pair.0), -1, None);
        }
        self.adjust(pair, -1, None);
        if r != NONE {
            self.adjust((pair.1, self.seq[r as usize]), -1, None);
        }
        self.seq[p as usize] = sym;
        self.seq[q as usize] = NONE;
        self.next[p as usize] = r;
        if r != NONE {
            self.prev[r as usize] = p;
        }
        if l != NONE {
            self.adjust((self.seq[l as usize], sym), 1, Some(l));
        }
        if r != NONE {
            self.adjust((sym, self.seq[r as usize]), 1, Some(p));
        }
    }
}

/// Replaces the most frequent adjacent pair (ties: smallest pair) until no
/// pair has two non-overlapping occurrences.
pub fn repair_compress(text: &[u8]) -> Result<RePair> {
    if text.is_empty() {
        return Err(Error::EmptyText);
    }
    if text.len() >= NONE as usize {
        return Err(Error::TextTooLong(text.len()));
    }
    let n = text.len() as u32;
    let mut st = State {
        seq: text.iter().map(|&c| u32::from(c)).collect(),
        next: (1..=n).map(|k| if k == n { NONE } else { k }).collect(),
        prev: (0..n).map(|k| if k == 0 { NONE } else { k - 1 }).collect(),
        counts: HashMap::new(),
        positions: HashMap::new(),
        queue: BTreeSet::new(),
        skipped: HashSet::new(),
    };
    for p in 0..n.saturating_sub(1) {
        let pair = st.pair_at(p).expect("not last");
        *st.counts.entry(pair).or_insert(0) += 1;
        st.positions.entry(pair).or_default().push(p);
    }
    for (&pair, &c) in &st.counts {
        if c >= 2 {
            st.queue.insert((Reverse(c), pair));
        }
    }
    let mut rules = Vec::new();
    while let Some(&(Reverse(count), pair)) = st.queue.first() {
        let occ = st.occurrences(pair);
        if occ.len() < 2 {
            st.queue.remove(&(Reverse(count), pair));
            st.skipped.insert(pair);
            // keep the stragglers findable if the pair comes back
            st.positions.insert(pair, occ);
            continue;
        }
        let sym = 256 + rules.len() as u32;
        rules.push(pair);
        for p in occ {
            st.replace(p, pair, sym);
        }
    }
    let mut sequence = Vec::new();
    let mut p = 0;
    while p != NONE {
        sequence.push(st.seq[p as usize]);
        p = st.next[p as usize];
    }
    Ok(RePair { rules, sequence })
}
