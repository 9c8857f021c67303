//! Seeded randomness.
//!
//! Everything random in the crate goes through ChaCha8, a counter-based
//! generator. Per-item draws (one schedule pair, one trial) use a dedicated
//! stream of the same key so they do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for a plain seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for item `index` under `seed`; independent of all other indices.
pub fn indexed_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed, used to give each harness trial its own seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    indexed_rng(seed, index).next_u64()
}
