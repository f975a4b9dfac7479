//! Append-only AVL grammars.
//!
//! Every nonterminal is either a terminal rule `A -> c` or a binary rule
//! `A -> X Y` whose children are older records and differ in height by at
//! most one. Records are never modified after creation; joins copy the
//! affected spine instead of rotating in place.

mod decompose;
mod merge;
mod prune;

use std::sync::atomic::{AtomicU64, Ordering};

pub(crate) use merge::greedy_merge;

use crate::containers::{BlockedArray, SideTables, LONG_THRESHOLD};
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, FingerprintContext};

const NO_TERMINAL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Terminal(u8),
    Binary(u32, u32),
}

impl Rule {
    /// `|rhs(A)|`.
    pub fn rhs_len(&self) -> u64 {
        match self {
            Rule::Terminal(_) => 1,
            Rule::Binary(..) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Record {
    pub rule: Rule,
    pub height: u8,
}

#[derive(Debug)]
pub struct Grammar {
    records: BlockedArray<Record>,
    tables: SideTables,
    terminals: [u32; 256],
    start: Option<u32>,
    fingerprints: Option<FingerprintContext>,
    size: u64,
    expansions: AtomicU64,
}

impl Clone for Grammar {
    fn clone(&self) -> Self {
        Grammar {
            records: self.records.clone(),
            tables: self.tables.clone(),
            terminals: self.terminals,
            start: self.start,
            fingerprints: self.fingerprints.clone(),
            size: self.size,
            expansions: AtomicU64::new(self.expansions.load(Ordering::Relaxed)),
        }
    }
}

impl Default for Grammar {
    fn default() -> Self {
        Self::new()
    }
}

impl Grammar {
    pub fn new() -> Self {
        Grammar {
            records: BlockedArray::new(),
            tables: SideTables::new(),
            terminals: [NO_TERMINAL; 256],
            start: None,
            fingerprints: None,
            size: 0,
            expansions: AtomicU64::new(0),
        }
    }

    /// A grammar that stores `Φ(A)` for every nonterminal with `|exp(A)| >= 255`.
    pub fn with_fingerprints(ctx: FingerprintContext) -> Self {
        Grammar { fingerprints: Some(ctx), ..Self::new() }
    }

    /// Number of nonterminals.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `|G| = Σ |rhs(A)|` over all records.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn start(&self) -> Option<u32> {
        self.start
    }

    pub fn set_start(&mut self, start: Option<u32>) {
        if let Some(s) = start {
            assert!((s as usize) < self.len(), "start {s} out of range");
        }
        self.start = start;
    }

    pub fn fingerprint_context(&self) -> Option<&FingerprintContext> {
        self.fingerprints.as_ref()
    }

    pub fn tables(&self) -> &SideTables {
        &self.tables
    }

    pub fn heap_bytes(&self) -> usize {
        self.records.heap_bytes() + self.tables.heap_bytes()
    }

    /// Number of short-nonterminal expansions done to compute fingerprints.
    pub fn fingerprint_expansions(&self) -> u64 {
        self.expansions.load(Ordering::Relaxed)
    }

    #[inline]
    pub fn record(&self, id: u32) -> Record {
        self.records[id as usize]
    }

    pub fn get(&self, id: u32) -> Result<Record> {
        self.records.get(id as usize).copied().ok_or(Error::UnknownId(id))
    }

    #[inline]
    pub fn rule(&self, id: u32) -> Rule {
        self.record(id).rule
    }

    #[inline]
    pub fn height(&self, id: u32) -> u8 {
        self.record(id).height
    }

    #[inline]
    pub fn explen(&self, id: u32) -> u64 {
        self.tables.explen(id)
    }

    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.records.iter().copied()
    }

    #[inline]
    fn children(&self, id: u32) -> (u32, u32) {
        match self.rule(id) {
            Rule::Binary(l, r) => (l, r),
            Rule::Terminal(_) => unreachable!("terminal {id} has no children"),
        }
    }

    pub fn terminal_id(&self, c: u8) -> Option<u32> {
        match self.terminals[c as usize] {
            NO_TERMINAL => None,
            id => Some(id),
        }
    }

    fn push(&mut self, rule: Rule, height: u8, len: u64, fp: Option<Fingerprint>) -> u32 {
        let id = u32::try_from(self.records.len()).expect("more than 2^32 nonterminals");
        self.records.push(Record { rule, height });
        self.tables.push(len, fp);
        self.size += rule.rhs_len();
        id
    }

    /// Appends `A -> c` without memoization (first one becomes the memo).
    pub(crate) fn push_terminal(&mut self, c: u8) -> u32 {
        let id = self.push(Rule::Terminal(c), 0, 1, None);
        if self.terminals[c as usize] == NO_TERMINAL {
            self.terminals[c as usize] = id;
        }
        id
    }

    /// Appends `A -> X Y`; the caller guarantees the AVL condition.
    pub(crate) fn push_binary(&mut self, x: u32, y: u32) -> u32 {
        let (hx, hy) = (self.height(x), self.height(y));
        debug_assert!(hx.abs_diff(hy) <= 1, "AVL violated joining {x} ({hx}) and {y} ({hy})");
        let (lx, ly) = (self.explen(x), self.explen(y));
        let len = lx + ly;
        let fp = match &self.fingerprints {
            Some(ctx) if len >= LONG_THRESHOLD => {
                let (fx, fy) = (self.fingerprint(x), self.fingerprint(y));
                Some(ctx.concat(fx, ly, fy))
            }
            _ => None,
        };
        self.push(Rule::Binary(x, y), hx.max(hy) + 1, len, fp)
    }

    /// `AddSymbol(c)`: the memoized terminal rule for `c`.
    pub fn add_symbol(&mut self, c: u8) -> u32 {
        match self.terminal_id(c) {
            Some(id) => id,
            None => self.push_terminal(c),
        }
    }

    /// `AddMerged(X, Y)`: a nonterminal expanding to `exp(X) exp(Y)`.
    ///
    /// Descends the spine of the taller operand to the first node at most
    /// one level above the shorter one, bridges there, and rebuilds the
    /// ancestors with single or double rotations. Creates at most
    /// `|height(X) - height(Y)| + 2` records.
    pub fn add_merged(&mut self, x: u32, y: u32) -> u32 {
        let (hx, hy) = (self.height(x), self.height(y));
        let (a, b) = if hx > hy + 1 {
            self.join_right(x, y)
        } else if hy > hx + 1 {
            self.join_left(x, y)
        } else {
            (x, y)
        };
        self.push_binary(a, b)
    }

    // h(x) > h(y) + 1. Returns a balanced, not yet materialized pair.
    fn join_right(&mut self, x: u32, y: u32) -> (u32, u32) {
        let (l, c) = self.children(x);
        let (a, b) =
            if self.height(c) <= self.height(y) + 1 { (c, y) } else { self.join_right(c, y) };
        let (ha, hb, hl) = (self.height(a), self.height(b), self.height(l));
        let ht = ha.max(hb) + 1;
        if ht <= hl + 1 {
            let t = self.push_binary(a, b);
            (l, t)
        } else if hb >= ha {
            let left = self.push_binary(l, a);
            (left, b)
        } else {
            let (a1, a2) = self.children(a);
            let left = self.push_binary(l, a1);
            let right = self.push_binary(a2, b);
            (left, right)
        }
    }

    // h(y) > h(x) + 1.
    fn join_left(&mut self, x: u32, y: u32) -> (u32, u32) {
        let (c, r) = self.children(y);
        let (a, b) =
            if self.height(c) <= self.height(x) + 1 { (x, c) } else { self.join_left(x, c) };
        let (ha, hb, hr) = (self.height(a), self.height(b), self.height(r));
        let ht = ha.max(hb) + 1;
        if ht <= hr + 1 {
            let t = self.push_binary(a, b);
            (t, r)
        } else if ha >= hb {
            let right = self.push_binary(b, r);
            (a, right)
        } else {
            let (b1, b2) = self.children(b);
            let left = self.push_binary(a, b1);
            let right = self.push_binary(b2, r);
            (left, right)
        }
    }

    /// Joins a sequence left to right by repeatedly merging the lowest
    /// element with its lower neighbour.
    pub fn merge_sequence(&mut self, seq: &[u32]) -> u32 {
        assert!(!seq.is_empty(), "cannot merge an empty sequence");
        let items = seq.iter().map(|&id| (self.height(id), id)).collect();
        greedy_merge(items, |x, y| {
            let id = self.add_merged(x, y);
            (self.height(id), id)
        })
    }

    /// `AddSubstring(A, i, j)`: a nonterminal expanding to `exp(A)[i..j]`.
    pub fn add_substring(&mut self, a: u32, i: u64, j: u64) -> Result<u32> {
        let parts = self.decompose(a, i, j)?;
        Ok(self.merge_sequence(&parts))
    }

    /// Calls `emit` on every symbol of `exp(a)` in order, stopping early
    /// when it returns `false`. Uses an explicit stack.
    pub fn walk(&self, a: u32, mut emit: impl FnMut(u8) -> bool) -> bool {
        let mut stack = vec![a];
        while let Some(id) = stack.pop() {
            match self.rule(id) {
                Rule::Terminal(c) => {
                    if !emit(c) {
                        return false;
                    }
                }
                Rule::Binary(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        true
    }

    pub fn expand(&self, a: u32) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.explen(a).min(1 << 30) as usize);
        self.walk(a, |c| {
            out.push(c);
            true
        });
        out
    }

    /// The first `k` symbols of `exp(a)`.
    pub fn expand_prefix(&self, a: u32, k: u64) -> Vec<u8> {
        let mut out = Vec::with_capacity(k.min(1 << 30) as usize);
        if k == 0 {
            return out;
        }
        self.walk(a, |c| {
            out.push(c);
            (out.len() as u64) < k
        });
        out
    }

    /// `Φ(exp(a))`: stored for long nonterminals, otherwise recomputed by
    /// expansion. Panics if the grammar was built without fingerprints.
    pub fn fingerprint(&self, a: u32) -> Fingerprint {
        let ctx = self.fingerprints.as_ref().expect("grammar built without fingerprints");
        if self.explen(a) >= LONG_THRESHOLD {
            if let Ok(Some(fp)) = self.tables.fp_long_get(a) {
                return fp;
            }
        }
        self.expansions.fetch_add(1, Ordering::Relaxed);
        ctx.of_string(&self.expand(a))
    }

    /// Every binary rule has children whose heights differ by at most one,
    /// and stored heights and lengths are consistent.
    pub fn avl_check(&self) -> bool {
        self.records.iter().enumerate().all(|(id, rec)| match rec.rule {
            Rule::Terminal(_) => rec.height == 0 && self.explen(id as u32) == 1,
            Rule::Binary(l, r) => {
                (l as usize) < id
                    && (r as usize) < id
                    && self.height(l).abs_diff(self.height(r)) <= 1
                    && rec.height == self.height(l).max(self.height(r)) + 1
                    && self.explen(id as u32) == self.explen(l) + self.explen(r)
            }
        })
    }

    /// `height(A) <= 1.45 log2(|exp(A)| + 2) + 2` for every `A`.
    pub fn height_check(&self) -> bool {
        (0..self.len() as u32).all(|id| {
            let bound = 1.45 * ((self.explen(id) + 2) as f64).log2() + 2.0;
            f64::from(self.height(id)) <= bound
        })
    }
}
