//! Seed derivation for reproducible, order-insensitive Monte Carlo.
//!
//! Every replication gets its own ChaCha8 generator. The 64-bit seed of a
//! replication is a SplitMix64 hash of `(base_seed, pair_index, replication)`,
//! so the draws of one replication never depend on which other replications
//! ran, or in which order. Independent draws within one replication use
//! distinct ChaCha streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for Gaussian data matrices.
pub const GAUSSIAN_STREAM: u64 = 0;
/// Stream used for the discrete counterexample sampler.
pub const DISCRETE_STREAM: u64 = 1;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `replication` of parameter point `pair_index`.
pub fn replication_seed(base_seed: u64, pair_index: u64, replication: u64) -> u64 {
    let h = splitmix64(base_seed);
    let h = splitmix64(h ^ pair_index.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(h ^ replication.wrapping_mul(0xA076_1D64_78BD_642F))
}

/// Generator for `seed` positioned on `stream`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
