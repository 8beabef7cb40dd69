//! Seeded random streams.
//!
//! Every simulation owns a [`ChaCha8Rng`] keyed by a 64-bit seed. Separate
//! ChaCha stream ids give independent substreams from one seed, so the
//! preparation draws and the outcome draws never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Substream id for the preparer's choice of ensemble member.
pub const PREPARATION_STREAM: u64 = 0;
/// Substream id for measurement outcomes.
pub const OUTCOME_STREAM: u64 = 1;

/// Opens substream `stream_id` of `seed`.
pub fn stream(seed: u64, stream_id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Derives the seed of child `index` from a parent seed (SplitMix64 finalizer
/// applied to `seed + (index + 1) * golden_gamma`).
pub fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
