//! The lazy converter: a sequence of roots instead of one prefix
//! nonterminal, merged only where a phrase source needs it, with sampled
//! Karp-Rabin deduplication.

use serde::Serialize;

use crate::containers::{RootsSequence, RootsStats};
use crate::error::{Error, Result};
use crate::fingerprint::{DedupMap, Fingerprint, FingerprintContext};
use crate::grammar::{greedy_merge, Grammar};
use crate::lz::{non_overlapping_pieces, validate, Factorization, Phrase, Violation};

/// Counters collected during one conversion.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LazyStats {
    pub n: u64,
    pub f: u64,
    /// Pairwise merges requested by `merge_enclosed`.
    pub merges_attempted: u64,
    /// Merges answered by a dedup hit instead of `add_merged`.
    pub merges_avoided: u64,
    /// Elements removed from appended sequences by the shortest-cover DP.
    pub dp_saved: u64,
    /// Dedup hits rejected by `--paranoid` expansion checks.
    pub paranoid_mismatches: u64,
    pub dedup_entries: u64,
    /// Grammar size plus the root sequence, before the final merge.
    pub size_pre_flatten: u64,
    pub roots_pre_flatten: u64,
    pub size: u64,
    pub records: u64,
    /// Records only ever grow, so this is also the final record count.
    pub peak_records: u64,
    pub peak_live_roots: u64,
    pub peak_heap_bytes: u64,
    pub roots: RootsStats,
}

impl LazyStats {
    /// Avoided merges as a percentage of attempted ones; 0 when none.
    pub fn avoided_percent(&self) -> f64 {
        if self.merges_attempted == 0 {
            0.0
        } else {
            self.merges_avoided as f64 / self.merges_attempted as f64 * 100.0
        }
    }
}

/// Phrase-at-a-time lazy conversion.
#[derive(Debug)]
pub struct LazyConverter {
    g: Grammar,
    roots: RootsSequence,
    dedup: DedupMap,
    paranoid: bool,
    offered: u32,
    phrases: u64,
    stats: LazyStats,
}

impl LazyConverter {
    /// `p` is the probability that a new nonterminal enters the dedup map;
    /// `seed` fixes both the fingerprint base and the sampling coin.
    pub fn new(p: f64, seed: u64, paranoid: bool) -> Result<Self> {
        let dedup = DedupMap::new(p, seed ^ 0x9e37_79b9_7f4a_7c15)?;
        Ok(LazyConverter {
            g: Grammar::with_fingerprints(FingerprintContext::new(seed)),
            roots: RootsSequence::new(),
            dedup,
            paranoid,
            offered: 0,
            phrases: 0,
            stats: LazyStats::default(),
        })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.g
    }

    pub fn roots(&self) -> &RootsSequence {
        &self.roots
    }

    pub fn dedup(&self) -> &DedupMap {
        &self.dedup
    }

    pub fn stats(&self) -> &LazyStats {
        &self.stats
    }

    /// Length of the prefix processed so far.
    pub fn written(&self) -> u64 {
        self.roots.end()
    }

    /// Registers `id` in the dedup map regardless of the sampling coin.
    pub fn register(&mut self, id: u32) -> Result<()> {
        self.g.get(id)?;
        let fp = self.g.fingerprint(id);
        self.dedup.insert(id, fp, self.g.explen(id));
        Ok(())
    }

    /// Mutable access for building fixtures before conversion starts.
    pub fn grammar_mut(&mut self) -> &mut Grammar {
        &mut self.g
    }

    fn offer_new(&mut self) {
        let end = self.g.len() as u32;
        for id in self.offered..end {
            let g = &self.g;
            self.dedup.offer_with(id, g.explen(id), || g.fingerprint(id));
        }
        self.offered = end;
    }

    fn concat_fp(&self, ids: &[u32]) -> Fingerprint {
        let ctx = self.g.fingerprint_context().expect("lazy grammar keeps fingerprints");
        ids.iter().fold(Fingerprint(0), |acc, &id| {
            ctx.concat(acc, self.g.explen(id), self.g.fingerprint(id))
        })
    }

    fn same_expansion(&self, hit: u32, parts: &[u32]) -> bool {
        let whole = self.g.expand(hit);
        let mut at = 0;
        parts.iter().all(|&p| {
            self.g.walk(p, |c| {
                let ok = whole.get(at) == Some(&c);
                at += 1;
                ok
            })
        }) && at == whole.len()
    }

    // A dedup hit for exp(parts), honouring paranoid mode.
    fn lookup(&mut self, parts: &[u32]) -> Option<u32> {
        if !self.dedup.is_active() {
            return None;
        }
        let len = parts.iter().map(|&id| self.g.explen(id)).sum();
        let hit = self.dedup.lookup(self.concat_fp(parts), len)?;
        if self.paranoid && !self.same_expansion(hit, parts) {
            self.stats.paranoid_mismatches += 1;
            return None;
        }
        Some(hit)
    }

    fn join_pair(&mut self, x: u32, y: u32) -> u32 {
        self.stats.merges_attempted += 1;
        if let Some(hit) = self.lookup(&[x, y]) {
            self.stats.merges_avoided += 1;
            return hit;
        }
        let id = self.g.add_merged(x, y);
        self.offer_new();
        id
    }

    /// Replaces the live roots lying entirely inside `[i..j]` by one root.
    pub fn merge_enclosed(&mut self, i: u64, j: u64) -> Result<()> {
        let Some((x, y)) = self.roots.range(i, j)? else {
            return Ok(());
        };
        let live = self.roots.live_between(x, y);
        if live.len() == 1 {
            return Ok(());
        }
        let items = live.iter().map(|&(_, id)| (self.g.height(id), id)).collect();
        let merged = greedy_merge(items, |a, b| {
            let id = self.join_pair(a, b);
            (self.g.height(id), id)
        });
        self.roots.replace_range(x, y, merged);
        Ok(())
    }

    /// Nonterminals spelling `prefix[i..j]`, reusing whole roots where
    /// possible and decomposing only the two boundary roots.
    pub fn decompose_with_roots(&mut self, i: u64, j: u64) -> Result<Vec<u32>> {
        let Some((x, y)) = self.roots.range(i, j)? else {
            let left = self.roots.locate(i)?;
            if j <= left.end {
                return self.g.decompose(left.id, i - left.start, j - left.start);
            }
            // nothing enclosed, so the root holding j follows directly
            let right = self.roots.locate(j)?;
            let mut out = self.g.decompose(left.id, i - left.start, left.end - left.start)?;
            out.extend(self.g.decompose(right.id, 1, j - right.start)?);
            return Ok(out);
        };
        let mut out = Vec::new();
        let left = self.roots.locate(i)?;
        if left.slot < x {
            out.extend(self.g.decompose(left.id, i - left.start, left.end - left.start)?);
        }
        out.extend(self.roots.live_between(x, y).into_iter().map(|(_, id)| id));
        let (ell_y, _) = self.roots.get(y);
        if j > ell_y {
            let right = self.roots.locate(j)?;
            out.extend(self.g.decompose(right.id, 1, j - right.start)?);
        }
        Ok(out)
    }

    /// Shortest sequence with the same concatenated expansion, where a
    /// segment of two or more elements may be replaced by a dedup hit.
    /// Among optimal covers the one with the longest first segment wins.
    pub fn optimal_root_sequence(&mut self, seq: &[u32]) -> Vec<u32> {
        let q = seq.len();
        if q < 2 || !self.dedup.is_active() {
            return seq.to_vec();
        }
        let g = &self.g;
        let ctx = g.fingerprint_context().expect("lazy grammar keeps fingerprints");
        let mut mismatches = 0;
        // best[i] = (segments needed for seq[i..], end of first segment, replacement)
        let mut best = vec![(0usize, q, None::<u32>); q + 1];
        for i in (0..q).rev() {
            best[i] = (best[i + 1].0 + 1, i + 1, None);
            let mut fp = Fingerprint(0);
            let mut len = 0;
            for j in i..q {
                let l = g.explen(seq[j]);
                fp = ctx.concat(fp, l, g.fingerprint(seq[j]));
                len += l;
                if j == i {
                    continue;
                }
                let Some(hit) = self.dedup.lookup(fp, len) else { continue };
                if self.paranoid && !self.same_expansion(hit, &seq[i..=j]) {
                    mismatches += 1;
                    continue;
                }
                let cost = best[j + 1].0 + 1;
                if cost <= best[i].0 {
                    best[i] = (cost, j + 1, Some(hit));
                }
            }
        }
        self.stats.paranoid_mismatches += mismatches;
        let mut out = Vec::with_capacity(best[0].0);
        let mut i = 0;
        while i < q {
            let (_, next, hit) = best[i];
            out.push(hit.unwrap_or(seq[i]));
            i = next;
        }
        self.stats.dp_saved += (q - out.len()) as u64;
        out
    }

    fn append(&mut self, id: u32) -> Result<()> {
        let end = self.roots.end() + self.g.explen(id);
        self.roots.push(end, id)
    }

    /// Processes the next phrase. Only the phrase itself is read.
    pub fn push_phrase(&mut self, phrase: &Phrase) -> Result<()> {
        let start = self.written() + 1;
        let index = self.phrases as usize;
        match *phrase {
            Phrase::Literal(c) => {
                let id = self.g.add_symbol(c);
                self.offer_new();
                self.append(id)?;
            }
            Phrase::Copy { src, len } => {
                let reason = match (src, len) {
                    (_, 0) => Some(Violation::EmptyCopy),
                    (0, _) => Some(Violation::ZeroSource),
                    (s, _) if s >= start => Some(Violation::SourceBeyondPrefix),
                    _ => None,
                };
                if let Some(reason) = reason {
                    return Err(Error::InvalidFactorization { index, reason });
                }
                for (src, c) in non_overlapping_pieces(start, src, len) {
                    let j = src + c - 1;
                    self.merge_enclosed(src, j)?;
                    let seq = self.decompose_with_roots(src, j)?;
                    for id in self.optimal_root_sequence(&seq) {
                        self.append(id)?;
                    }
                }
            }
        }
        self.phrases += 1;
        self.stats.peak_live_roots = self.stats.peak_live_roots.max(self.roots.live_len() as u64);
        let heap = self.heap_bytes() as u64;
        self.stats.peak_heap_bytes = self.stats.peak_heap_bytes.max(heap);
        Ok(())
    }

    /// Estimated heap use of the converter state.
    pub fn heap_bytes(&self) -> usize {
        // hashbrown keeps one control byte per bucket next to the entry
        let dedup = self.dedup.len() * (std::mem::size_of::<((u64, u64), u32)>() + 1);
        self.g.heap_bytes() + self.roots.heap_bytes() + dedup
    }

    /// Live roots in order, as `(end, id)`.
    pub fn live_roots(&self) -> Vec<(u64, u32)> {
        self.roots.iter_live().collect()
    }

    /// Merges all roots into the start symbol and returns the grammar.
    pub fn finish(mut self) -> Result<(Grammar, u32, LazyStats)> {
        let n = self.written();
        if n == 0 {
            return Err(Error::EmptyText);
        }
        let m = self.roots.live_len() as u64;
        self.stats.roots_pre_flatten = m;
        self.stats.size_pre_flatten = self.g.size() + if m > 1 { m } else { 0 };
        self.merge_enclosed(1, n)?;
        let (_, start) = self.roots.iter_live().next().expect("one root after the final merge");
        self.g.set_start(Some(start));
        let heap = self.heap_bytes() as u64;
        let mut stats = self.stats;
        stats.n = n;
        stats.f = self.phrases;
        stats.size = self.g.size();
        stats.records = self.g.len() as u64;
        stats.peak_records = stats.records;
        stats.peak_heap_bytes = stats.peak_heap_bytes.max(heap);
        stats.dedup_entries = self.dedup.len() as u64;
        stats.roots = self.roots.stats();
        Ok((self.g, start, stats))
    }
}

/// Converts a factorization with lazy merging and dedup probability `p`.
///
/// Takes only the factorization: the text is never consulted.
pub fn convert_lazy(
    fact: &Factorization,
    p: f64,
    seed: u64,
    paranoid: bool,
) -> Result<(Grammar, u32, LazyStats)> {
    validate(fact, None).into_result()?;
    let mut conv = LazyConverter::new(p, seed, paranoid)?;
    for phrase in fact.phrases() {
        conv.push_phrase(phrase)?;
    }
    conv.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::lz77_parse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn roots_text(conv: &LazyConverter) -> Vec<u8> {
        conv.live_roots().iter().flat_map(|&(_, id)| conv.grammar().expand(id)).collect()
    }

    fn literals(conv: &mut LazyConverter, s: &[u8]) {
        for &c in s {
            conv.push_phrase(&Phrase::Literal(c)).unwrap();
        }
    }

    #[test]
    fn example_parse_round_trips() {
        let text = b"bbabaababababaababa";
        let fact = lz77_parse(text).unwrap();
        for p in [0.0, 0.125, 1.0] {
            let (g, start, stats) = convert_lazy(&fact, p, 7, true).unwrap();
            assert_eq!(g.expand(start), text);
            assert!(g.avl_check() && g.height_check());
            assert_eq!(stats.paranoid_mismatches, 0);
            assert_eq!((stats.n, stats.f), (19, 7));
        }
    }

    #[test]
    fn self_referential_copy() {
        let fact = Factorization::new(vec![Phrase::Literal(b'a'), Phrase::Copy { src: 1, len: 3 }]);
        let (g, start, _) = convert_lazy(&fact, 0.0, 1, false).unwrap();
        assert_eq!(g.expand(start), b"aaaa");
    }

    #[test]
    fn invalid_phrase_rejected() {
        let mut conv = LazyConverter::new(0.0, 1, false).unwrap();
        let err = conv.push_phrase(&Phrase::Copy { src: 1, len: 1 }).unwrap_err();
        assert!(matches!(err, Error::InvalidFactorization { reason: Violation::SourceBeyondPrefix, .. }));
        assert!(LazyConverter::new(1.5, 1, false).is_err());
    }

    #[test]
    fn merge_enclosed_cases() {
        let mut conv = LazyConverter::new(0.0, 3, false).unwrap();
        literals(&mut conv, b"abcd");
        // [2..3] encloses roots 2 and 3 only
        conv.merge_enclosed(2, 3).unwrap();
        assert_eq!(conv.live_roots().len(), 3);
        assert_eq!(roots_text(&conv), b"abcd");
        // nothing enclosed inside a single root
        let before = conv.live_roots();
        conv.merge_enclosed(2, 2).unwrap();
        assert_eq!(conv.live_roots(), before);
        conv.merge_enclosed(1, 4).unwrap();
        assert_eq!(conv.live_roots().len(), 1);
        assert_eq!(roots_text(&conv), b"abcd");
        assert!(conv.merge_enclosed(0, 1).is_err());
        assert!(conv.merge_enclosed(1, 5).is_err());
    }

    #[test]
    fn merge_enclosed_three_roots() {
        // ends 2, 5, 9, all heights equal
        let mut conv = LazyConverter::new(0.0, 3, false).unwrap();
        for s in [&b"ab"[..], b"cde", b"fghi"] {
            let g = conv.grammar_mut();
            let ids: Vec<u32> = s.iter().map(|&c| g.add_symbol(c)).collect();
            let id = g.merge_sequence(&ids);
            conv.append(id).unwrap();
        }
        assert_eq!(conv.live_roots().iter().map(|r| r.0).collect::<Vec<_>>(), vec![2, 5, 9]);
        conv.merge_enclosed(1, 9).unwrap();
        assert_eq!(conv.live_roots().len(), 1);
        assert_eq!(roots_text(&conv), b"abcdefghi");
    }

    #[test]
    fn constructed_dedup_hit() {
        let mut conv = LazyConverter::new(1.0, 5, true).unwrap();
        let g = conv.grammar_mut();
        let (a, b) = (g.add_symbol(b'a'), g.add_symbol(b'b'));
        let ab = g.add_merged(a, b);
        conv.register(ab).unwrap();
        conv.offered = conv.grammar().len() as u32;
        conv.append(a).unwrap();
        conv.append(b).unwrap();
        let records = conv.grammar().len();
        conv.merge_enclosed(1, 2).unwrap();
        assert_eq!(conv.grammar().len(), records);
        assert_eq!(conv.stats().merges_avoided, 1);
        assert_eq!(conv.stats().merges_attempted, 1);
        assert_eq!(conv.live_roots(), vec![(2, ab)]);
    }

    #[test]
    fn decompose_with_roots_boundaries() {
        let mut conv = LazyConverter::new(0.0, 3, false).unwrap();
        for s in [&b"abcd"[..], b"efgh", b"ijkl"] {
            let g = conv.grammar_mut();
            let ids: Vec<u32> = s.iter().map(|&c| g.add_symbol(c)).collect();
            let id = g.merge_sequence(&ids);
            conv.append(id).unwrap();
        }
        let roots: Vec<u32> = conv.live_roots().iter().map(|r| r.1).collect();
        assert_eq!(conv.decompose_with_roots(5, 12).unwrap(), roots[1..]);
        assert_eq!(conv.decompose_with_roots(1, 12).unwrap(), roots);
        let inside = conv.decompose_with_roots(6, 7).unwrap();
        let got: Vec<u8> = inside.iter().flat_map(|&id| conv.grammar().expand(id)).collect();
        assert_eq!(got, b"fg");
        let across = conv.decompose_with_roots(3, 10).unwrap();
        assert!(across.contains(&roots[1]));
        let got: Vec<u8> = across.iter().flat_map(|&id| conv.grammar().expand(id)).collect();
        assert_eq!(got, b"cdefghij");
        let straddle = conv.decompose_with_roots(3, 6).unwrap();
        let got: Vec<u8> = straddle.iter().flat_map(|&id| conv.grammar().expand(id)).collect();
        assert_eq!(got, b"cdef");
    }

    // Exhaustive minimum over all segmentations.
    fn brute_cover(seq: &[u32], hit: &dyn Fn(usize, usize) -> bool) -> usize {
        let q = seq.len();
        let mut best = usize::MAX;
        for cuts in 0u32..1 << (q - 1) {
            let mut start = 0;
            let mut count = 0;
            let mut ok = true;
            for k in 0..q {
                let last = k == q - 1 || cuts & (1 << k) != 0;
                if last {
                    if k > start && !hit(start, k) {
                        ok = false;
                        break;
                    }
                    count += 1;
                    start = k + 1;
                }
            }
            if ok {
                best = best.min(count);
            }
        }
        best
    }

    #[test]
    fn optimal_sequence_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for round in 0..200 {
            let mut conv = LazyConverter::new(1.0, round, true).unwrap();
            conv.dedup = DedupMap::new(0.0, 0).unwrap();
            let q = rng.gen_range(1..=8);
            let g = conv.grammar_mut();
            // distinct letters keep segment expansions distinct
            let seq: Vec<u32> = (0..q).map(|k| g.add_symbol(b'a' + k as u8)).collect();
            let mut registered = std::collections::HashSet::new();
            for i in 0..q {
                for j in i + 1..q {
                    if rng.gen_bool(0.3) {
                        let id = conv.grammar_mut().merge_sequence(&seq[i..=j]);
                        conv.register(id).unwrap();
                        registered.insert((i, j));
                    }
                }
            }
            let out = conv.optimal_root_sequence(&seq);
            let want = brute_cover(&seq, &|i, j| registered.contains(&(i, j)));
            assert_eq!(out.len(), want, "round {round}");
            let got: Vec<u8> = out.iter().flat_map(|&id| conv.grammar().expand(id)).collect();
            let expect: Vec<u8> = (0..q).map(|k| b'a' + k as u8).collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn optimal_sequence_edge_cases() {
        let mut conv = LazyConverter::new(1.0, 2, false).unwrap();
        let g = conv.grammar_mut();
        let seq: Vec<u32> = b"xyz".iter().map(|&c| g.add_symbol(c)).collect();
        conv.dedup = DedupMap::new(1.0, 0).unwrap();
        assert_eq!(conv.optimal_root_sequence(&seq), seq);
        let whole = conv.grammar_mut().merge_sequence(&seq);
        conv.register(whole).unwrap();
        assert_eq!(conv.optimal_root_sequence(&seq), vec![whole]);
    }

    #[test]
    fn roots_invariant_on_random_texts() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let sigma = [2u8, 4, 26][rng.gen_range(0..3)];
            let n = rng.gen_range(1..1500);
            let mut text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            if rng.gen_bool(0.5) {
                let copy = text.clone();
                text.extend_from_slice(&copy);
            }
            let fact = lz77_parse(&text).unwrap();
            let p = [0.0, 0.125, 1.0][rng.gen_range(0..3)];
            let mut conv = LazyConverter::new(p, rng.gen(), true).unwrap();
            let mut written = 0;
            for phrase in fact.phrases() {
                conv.push_phrase(phrase).unwrap();
                written += phrase.len() as usize;
                assert_eq!(roots_text(&conv), text[..written]);
            }
            let (g, start, stats) = conv.finish().unwrap();
            assert_eq!(g.expand(start), text);
            assert!(g.avl_check() && g.height_check());
            assert_eq!(stats.paranoid_mismatches, 0);
            assert!(stats.merges_avoided <= stats.merges_attempted);
        }
    }

    #[test]
    fn avoided_percent_definition() {
        let mut s = LazyStats::default();
        assert_eq!(s.avoided_percent(), 0.0);
        s.merges_attempted = 8;
        s.merges_avoided = 2;
        assert_eq!(s.avoided_percent(), 25.0);
    }
}
