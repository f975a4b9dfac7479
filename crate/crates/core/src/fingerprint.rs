//! Karp-Rabin fingerprints modulo the Mersenne prime `2^61 - 1`.
//!
//! `Φ(S) = Σ S[i] · r^{|S|-i} mod q`. Concatenation is O(1) given the
//! length of the right operand: `Φ(XY) = Φ(X) · r^{|Y|} + Φ(Y)`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MERSENNE_61: u64 = (1 << 61) - 1;

const LEVEL_BITS: u32 = 12;
const LEVEL: usize = 1 << LEVEL_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fingerprint(pub u64);

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let prod = u128::from(a) * u128::from(b);
    let lo = (prod as u64) & MERSENNE_61;
    let hi = (prod >> 61) as u64;
    let s = lo + hi;
    if s >= MERSENNE_61 {
        s - MERSENNE_61
    } else {
        s
    }
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MERSENNE_61 {
        s - MERSENNE_61
    } else {
        s
    }
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Modulus, random base and a three-level power table.
///
/// Immutable after construction. Powers `r^e` for `e < 2^36` take at most
/// two multiplications; larger exponents fall back to square-and-multiply.
#[derive(Debug, Clone)]
pub struct FingerprintContext {
    base: u64,
    // powers[k][t] = r^(t << (k * LEVEL_BITS))
    powers: [Vec<u64>; 3],
}

impl FingerprintContext {
    /// Draws `r` uniformly from `[1 .. q-1]`.
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::with_base(rng.gen_range(1..MERSENNE_61))
    }

    pub fn with_base(base: u64) -> Self {
        assert!(base > 0 && base < MERSENNE_61, "base must lie in [1, q)");
        let table = |step: u64| {
            let mut v = Vec::with_capacity(LEVEL);
            let mut x = 1;
            for _ in 0..LEVEL {
                v.push(x);
                x = mul_mod(x, step);
            }
            v
        };
        let p1 = pow_mod(base, 1 << LEVEL_BITS);
        let p2 = pow_mod(base, 1 << (2 * LEVEL_BITS));
        FingerprintContext { base, powers: [table(base), table(p1), table(p2)] }
    }

    pub fn modulus(&self) -> u64 {
        MERSENNE_61
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// `r^e mod q`.
    pub fn power(&self, e: u64) -> u64 {
        if e >> (3 * LEVEL_BITS) != 0 {
            return pow_mod(self.base, e);
        }
        let mask = (LEVEL - 1) as u64;
        let a = self.powers[0][(e & mask) as usize];
        let b = self.powers[1][((e >> LEVEL_BITS) & mask) as usize];
        let c = self.powers[2][(e >> (2 * LEVEL_BITS)) as usize];
        mul_mod(mul_mod(a, b), c)
    }

    pub fn of_string(&self, s: &[u8]) -> Fingerprint {
        Fingerprint(s.iter().fold(0, |h, &c| add_mod(mul_mod(h, self.base), u64::from(c))))
    }

    /// Fingerprint of `XY` from `Φ(X)`, `|Y|` and `Φ(Y)`.
    pub fn concat(&self, fx: Fingerprint, len_y: u64, fy: Fingerprint) -> Fingerprint {
        Fingerprint(add_mod(mul_mod(fx.0, self.power(len_y)), fy.0))
    }
}

/// Sampled map from `(Φ(exp(A)), |exp(A)|)` to `A`.
///
/// Each offer is stored with probability `p`; the first writer of a key
/// keeps it.
#[derive(Debug, Clone)]
pub struct DedupMap {
    entries: HashMap<(u64, u64), u32>,
    p: f64,
    rng: ChaCha8Rng,
    offers: u64,
}

impl DedupMap {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadProbability(p));
        }
        Ok(DedupMap { entries: HashMap::new(), p, rng: ChaCha8Rng::seed_from_u64(seed), offers: 0 })
    }

    pub fn probability(&self) -> f64 {
        self.p
    }

    /// False when no lookup can ever succeed.
    pub fn is_active(&self) -> bool {
        self.p > 0.0 || !self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn offers(&self) -> u64 {
        self.offers
    }

    pub fn lookup(&self, fp: Fingerprint, len: u64) -> Option<u32> {
        self.entries.get(&(fp.0, len)).copied()
    }

    pub fn offer(&mut self, id: u32, fp: Fingerprint, len: u64) -> bool {
        self.offer_with(id, len, || fp)
    }

    /// Like [`offer`](Self::offer), computing the fingerprint only when the
    /// coin flip keeps the entry.
    pub fn offer_with(&mut self, id: u32, len: u64, fp: impl FnOnce() -> Fingerprint) -> bool {
        self.offers += 1;
        let keep = match self.p {
            p if p <= 0.0 => false,
            p if p >= 1.0 => true,
            p => self.rng.gen_bool(p),
        };
        if !keep {
            return false;
        }
        match self.entries.entry((fp().0, len)) {
            Entry::Occupied(_) => false,
            Entry::Vacant(v) => {
                v.insert(id);
                true
            }
        }
    }

    /// Inserts unconditionally (first writer wins). Used to seed a map.
    pub fn insert(&mut self, id: u32, fp: Fingerprint, len: u64) -> bool {
        match self.entries.entry((fp.0, len)) {
            Entry::Occupied(_) => false,
            Entry::Vacant(v) => {
                v.insert(id);
                true
            }
        }
    }
}
