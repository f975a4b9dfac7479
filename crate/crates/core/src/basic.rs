//! The baseline converter: one nonterminal `P_k` with `exp(P_k) = F_1...F_k`
//! after every phrase.

use crate::error::Result;
use crate::grammar::Grammar;
use crate::lz::{non_overlapping_pieces, validate, Factorization, Phrase};

/// Converts a factorization into an AVL grammar whose start symbol expands
/// to the decoded text. Nothing is pruned.
///
/// Every copy phrase is materialized as `AddSubstring(P_{k-1}, src, src+len-1)`
/// and appended with `AddMerged`. Self-referential copies are split into
/// non-overlapping pieces of doubling length first.
pub fn convert_basic(fact: &Factorization) -> Result<Grammar> {
    validate(fact, None).into_result()?;
    let mut g = Grammar::new();
    let mut prefix: Option<u32> = None;
    let mut written = 0u64;
    for phrase in fact.phrases() {
        match *phrase {
            Phrase::Literal(c) => {
                let a = g.add_symbol(c);
                prefix = Some(match prefix {
                    Some(p) => g.add_merged(p, a),
                    None => a,
                });
                written += 1;
            }
            Phrase::Copy { src, len } => {
                for (src, piece) in non_overlapping_pieces(written + 1, src, len) {
                    let p = prefix.expect("a copy never comes first");
                    let a = g.add_substring(p, src, src + piece - 1)?;
                    prefix = Some(g.add_merged(p, a));
                    written += piece;
                }
            }
        }
    }
    g.set_start(prefix);
    Ok(g)
}
