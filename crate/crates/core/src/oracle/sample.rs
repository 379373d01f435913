use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::ModelConfig;

/// Generator description recorded alongside sampled output.
pub const GENERATOR: &str =
    "ChaCha20Rng (rand_chacha 0.9), seed_from_u64(seed), stream = shard index";

/// Draws per independently seeded shard.
pub const SHARD_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Draw {
    pub l0: bool,
    pub loss: usize,
}

/// Exact sampler: `L0 ~ Bernoulli(p)`, then each `Li` independently with the
/// conditional default probability for that state of `L0`.
///
/// Draws are generated in shards of [`SHARD_SIZE`]; shard `k` uses the ChaCha
/// stream `k` under the master seed, so the output does not depend on how
/// shards are scheduled across threads.
pub fn sample(cfg: &ModelConfig, count: usize, seed: u64) -> Result<Vec<Draw>> {
    if count == 0 {
        return Err(ModelError::EmptySample);
    }
    let (p, n) = (cfg.p(), cfg.n_credits());
    let (rate_solvent, rate_default) = cfg.conditional_probs();
    let shards = count.div_ceil(SHARD_SIZE);

    let chunks: Vec<Vec<Draw>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let len = SHARD_SIZE.min(count - shard * SHARD_SIZE);
            (0..len)
                .map(|_| {
                    let l0 = rng.random::<f64>() < p;
                    let rate = if l0 { rate_default } else { rate_solvent };
                    let loss = (0..n).filter(|_| rng.random::<f64>() < rate).count();
                    Draw { l0, loss }
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// Empirical loss frequencies on `{0, ..., n}`.
pub fn loss_histogram(draws: &[Draw], n: usize) -> Vec<f64> {
    let mut counts = vec![0usize; n + 1];
    for d in draws {
        counts[d.loss] += 1;
    }
    let total = draws.len() as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

/// Total variation distance `0.5 * sum |a - b|`.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
