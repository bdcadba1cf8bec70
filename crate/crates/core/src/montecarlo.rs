//! Replica-parallel Monte Carlo.
//!
//! `n_samples` are split over `replicas` blocks. Replica `r` draws its
//! per-sample seeds from a ChaCha stream seeded by
//! `master_seed ^ (r * 0x9E3779B97F4A7C15)`, and replica results are
//! combined in replica order. The outcome therefore depends on
//! `(master_seed, replicas, n_samples)` and never on the thread count.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub n_samples: u64,
    pub master_seed: u64,
    pub replicas: u32,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Two-sided confidence level of reported intervals.
    pub confidence: f64,
}

pub const DEFAULT_REPLICAS: u32 = 16;
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

impl MonteCarlo {
    pub fn new(n_samples: u64, master_seed: u64) -> Self {
        MonteCarlo {
            n_samples,
            master_seed,
            replicas: DEFAULT_REPLICAS,
            threads: None,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    pub fn with_seed(self, master_seed: u64) -> Self {
        MonteCarlo { master_seed, ..self }
    }

    pub fn with_samples(self, n_samples: u64) -> Self {
        MonteCarlo { n_samples, ..self }
    }

    pub fn with_confidence(self, confidence: f64) -> Self {
        MonteCarlo { confidence, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(invalid("replicas must be positive"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(invalid(format!("confidence {} not in (0, 1)", self.confidence)));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be positive"));
        }
        Ok(())
    }

    /// Samples handled by replica `r`.
    pub fn replica_samples(&self, r: u32) -> u64 {
        let base = self.n_samples / self.replicas as u64;
        base + u64::from((r as u64) < self.n_samples % self.replicas as u64)
    }

    /// Run `work(seeds)` once per replica and return the results in replica
    /// order. `seeds` yields one independent 64-bit seed per sample.
    pub fn run<T, F>(&self, work: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut dyn Iterator<Item = u64>) -> T + Sync,
    {
        self.validate()?;
        let job = || {
            (0..self.replicas)
                .into_par_iter()
                .map(|r| {
                    let mut rng = rng_from_seed(derive_seed(self.master_seed, r as u64));
                    let mut seeds = (0..self.replica_samples(r)).map(move |_| rng.next_u64());
                    work(&mut seeds)
                })
                .collect::<Vec<T>>()
        };
        match self.threads {
            None => Ok(job()),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| invalid(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}
