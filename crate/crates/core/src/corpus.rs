//! Synthetic repetitive collections: a random seed block followed by
//! point-mutated copies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How copies relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CopyModel {
    /// Each copy mutates the previous one, like successive versions.
    #[default]
    Chain,
    /// Each copy mutates the seed block independently.
    Star,
}

/// Parameters of a generated file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSpec {
    pub seed_size: usize,
    /// Total number of blocks, the seed block included.
    pub copies: usize,
    /// Per-symbol substitution probability in each copy.
    pub mutation_rate: f64,
    /// Alphabet size; 4 or less draws from `ACGT`, otherwise raw bytes.
    pub sigma: u16,
    pub rng_seed: u64,
    pub model: CopyModel,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed_size: 10_000,
            copies: 200,
            mutation_rate: 0.0,
            sigma: 4,
            rng_seed: 1,
            model: CopyModel::Chain,
        }
    }
}

fn symbol(sigma: u16, k: u16) -> u8 {
    if sigma <= 4 {
        b"ACGT"[k as usize]
    } else {
        k as u8
    }
}

/// Deterministic in `spec`. A mutation substitutes a different symbol.
pub fn gen_corpus(spec: &CorpusSpec) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&spec.mutation_rate) {
        return Err(Error::BadProbability(spec.mutation_rate));
    }
    let sigma = spec.sigma.clamp(2, 256);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let seed: Vec<u8> = (0..spec.seed_size).map(|_| symbol(sigma, rng.gen_range(0..sigma))).collect();
    let mut out = Vec::with_capacity(spec.seed_size * spec.copies.max(1));
    out.extend_from_slice(&seed);
    let mut block = seed.clone();
    for _ in 1..spec.copies {
        if spec.model == CopyModel::Star {
            block.copy_from_slice(&seed);
        }
        if spec.mutation_rate > 0.0 {
            for c in block.iter_mut() {
                if rng.gen_bool(spec.mutation_rate) {
                    let d = symbol(sigma, rng.gen_range(0..sigma - 1));
                    *c = if d == *c { symbol(sigma, sigma - 1) } else { d };
                }
            }
        }
        out.extend_from_slice(&block);
    }
    Ok(out)
}
