//! Seed plumbing and the per-edge uniform field used by percolation.
//!
//! Every edge of a configuration draws exactly one 64-bit word from a ChaCha8
//! stream keyed by the configuration seed: edge `e` owns the `e`-th `u64` of
//! the stream. ChaCha is counter based, so the word for a single edge can be
//! produced by seeking, and a lazily explored cluster sees exactly the same
//! configuration as a full sweep over the edge list.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Golden-ratio increment used to spread replica indices over seed space.
pub const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of replica `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    master ^ index.wrapping_mul(SEED_STRIDE)
}

/// Seed of an independent sample pool (pool indices never collide with
/// replica indices, which stay below 2^32).
pub fn pool_seed(master: u64, pool: u32) -> u64 {
    derive_seed(master, (u64::from(pool) + 1) << 32)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Map a 64-bit word to `[0, 1)` using its top 53 bits.
#[inline]
pub fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform variables attached to the edges of one configuration.
///
/// Small graphs precompute every edge's word in one sequential pass; large
/// graphs seek on demand. Both give identical values.
pub enum EdgeField {
    Dense(Vec<u64>),
    Lazy(LazyWords),
}

/// Seeking reader that keeps the last block of `LAZY_BLOCK` words.
pub struct LazyWords {
    rng: ChaCha8Rng,
    block: usize,
    words: [u64; LAZY_BLOCK],
}

const LAZY_BLOCK: usize = 32;

/// Edge counts up to this size are materialised eagerly.
pub const DENSE_EDGE_LIMIT: usize = 8192;

impl EdgeField {
    pub fn new(seed: u64, edge_count: usize) -> Self {
        if edge_count <= DENSE_EDGE_LIMIT {
            Self::dense(seed, edge_count)
        } else {
            Self::lazy(seed)
        }
    }

    pub fn dense(seed: u64, edge_count: usize) -> Self {
        let mut rng = rng_from_seed(seed);
        EdgeField::Dense((0..edge_count).map(|_| rng.next_u64()).collect())
    }

    pub fn lazy(seed: u64) -> Self {
        EdgeField::Lazy(LazyWords {
            rng: rng_from_seed(seed),
            block: usize::MAX,
            words: [0; LAZY_BLOCK],
        })
    }

    #[inline]
    pub fn word(&mut self, edge: usize) -> u64 {
        match self {
            EdgeField::Dense(words) => words[edge],
            EdgeField::Lazy(lazy) => {
                let block = edge / LAZY_BLOCK;
                if block != lazy.block {
                    // word positions count 32-bit words
                    lazy.rng.set_word_pos((2 * block * LAZY_BLOCK) as u128);
                    for w in lazy.words.iter_mut() {
                        *w = lazy.rng.next_u64();
                    }
                    lazy.block = block;
                }
                lazy.words[edge % LAZY_BLOCK]
            }
        }
    }

    #[inline]
    pub fn uniform(&mut self, edge: usize) -> f64 {
        unit_interval(self.word(edge))
    }

    /// Standard monotone coupling: open iff `U_e < p`.
    #[inline]
    pub fn is_open(&mut self, edge: usize, p: f64) -> bool {
        self.uniform(edge) < p
    }
}
