//! Seeded randomness. Every stochastic routine takes an explicit seed; the
//! ChaCha stream is fixed across platforms and crate releases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}
