use super::{Grammar, Rule};
use crate::error::{Error, Result};

impl Grammar {
    /// Records reachable from `roots` (and from the start symbol, if set).
    pub fn reachable(&self, roots: &[u32]) -> Result<Vec<bool>> {
        let mut seen = vec![false; self.len()];
        let mut stack = Vec::new();
        for &r in roots.iter().chain(self.start.iter()) {
            self.get(r)?;
            stack.push(r);
        }
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id as usize], true) {
                continue;
            }
            if let Rule::Binary(l, r) = self.rule(id) {
                stack.push(l);
                stack.push(r);
            }
        }
        Ok(seen)
    }

    /// A copy keeping only records reachable from `roots` and the start
    /// symbol, renumbered in their original order. Returns the new grammar
    /// and the new ids of `roots`.
    pub fn prune(&self, roots: &[u32]) -> Result<(Grammar, Vec<u32>)> {
        let keep = self.reachable(roots)?;
        let mut remap = vec![u32::MAX; self.len()];
        let mut out = Grammar { fingerprints: self.fingerprints.clone(), ..Grammar::new() };
        for (id, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            remap[id] = match self.rule(id as u32) {
                Rule::Terminal(c) => out.push_terminal(c),
                Rule::Binary(l, r) => out.push_binary(remap[l as usize], remap[r as usize]),
            };
        }
        out.start = self.start.map(|s| remap[s as usize]);
        let roots = roots.iter().map(|&r| remap[r as usize]).collect();
        Ok((out, roots))
    }

    /// Prunes to the start symbol; errors if none is set.
    pub fn pruned(&self) -> Result<Grammar> {
        match self.start {
            Some(_) => Ok(self.prune(&[])?.0),
            None => Err(Error::NoStart),
        }
    }
}
