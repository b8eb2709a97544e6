//! Seeded randomness shared by every sampling operation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream `index` of the generator seeded with `seed`.
///
/// Streams for distinct indices never overlap, so trial `i` of a batch draws
/// the same values regardless of how the batch is scheduled.
pub fn split(seed: u64, index: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
