use super::{Grammar, Rule};
use crate::error::{Error, Result};

impl Grammar {
    /// `Decompose(A, i, j)`: nonterminals `B_1..B_q` with
    /// `exp(B_1)...exp(B_q) = exp(A)[i..j]` (1-based, inclusive).
    ///
    /// Descends to the deepest node whose expansion still contains the
    /// whole range, then walks its left child along the `i` boundary
    /// (collecting right siblings) and its right child along the `j`
    /// boundary (collecting left siblings). Heights are non-decreasing on
    /// the left part and non-increasing on the right part.
    pub fn decompose(&self, a: u32, i: u64, j: u64) -> Result<Vec<u32>> {
        let len = self.get(a).map(|_| self.explen(a))?;
        if i == 0 || i > j || j > len {
            return Err(Error::RangeOutOfBounds { i, j, len });
        }
        let (mut node, mut i, mut j) = (a, i, j);
        loop {
            if i == 1 && j == self.explen(node) {
                return Ok(vec![node]);
            }
            let (l, r) = match self.rule(node) {
                Rule::Binary(l, r) => (l, r),
                Rule::Terminal(_) => unreachable!("a terminal is always fully covered"),
            };
            let ll = self.explen(l);
            if j <= ll {
                node = l;
            } else if i > ll {
                node = r;
                i -= ll;
                j -= ll;
            } else {
                let mut out = self.suffix_nodes(l, i);
                self.prefix_nodes(r, j - ll, &mut out);
                return Ok(out);
            }
        }
    }

    // exp(v)[i..], left to right
    fn suffix_nodes(&self, mut v: u32, mut i: u64) -> Vec<u32> {
        let mut siblings = Vec::new();
        while i != 1 {
            let Rule::Binary(l, r) = self.rule(v) else { unreachable!() };
            let ll = self.explen(l);
            if i > ll {
                v = r;
                i -= ll;
            } else {
                siblings.push(r);
                v = l;
            }
        }
        let mut out = Vec::with_capacity(siblings.len() + 1);
        out.push(v);
        out.extend(siblings.into_iter().rev());
        out
    }

    // exp(v)[..j], appended left to right
    fn prefix_nodes(&self, mut v: u32, mut j: u64, out: &mut Vec<u32>) {
        while j != self.explen(v) {
            let Rule::Binary(l, r) = self.rule(v) else { unreachable!() };
            let ll = self.explen(l);
            if j <= ll {
                v = l;
            } else {
                out.push(l);
                v = r;
                j -= ll;
            }
        }
        out.push(v);
    }
}
