//! Seed splitting.
//!
//! A child seed is the first `u64` of a ChaCha8 generator seeded with the
//! parent seed and switched to stream `index`. Scenes, attempts and
//! replications all derive their seeds this way, so a run is fully
//! determined by its master seed regardless of execution order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(parent);
    rng.set_stream(index);
    rng.next_u64()
}

/// Generator for one independent stream under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
