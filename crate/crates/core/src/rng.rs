//! Deterministic, portable randomness.
//!
//! Every random quantity in this crate is derived from a single `u64`
//! seed through ChaCha8, a named, seedable generator whose output is
//! identical on every platform. Parallel work never shares a generator:
//! each restart or instance index gets its own ChaCha *stream* via
//! [`substream`], so results do not depend on scheduling or thread
//! count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The one generator used throughout the crate.
pub type Rng64 = ChaCha8Rng;

/// Root generator for a seed (stream 0).
pub fn master(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `index` of the given seed.
///
/// Substreams with distinct indices never overlap; this is the
/// stream-splitting rule used for search restarts (one substream per
/// restart index) and batch suite instances (one per instance index).
pub fn substream(seed: u64, index: u64) -> Rng64 {
    let mut rng = master(seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 mix step, used to derive per-word seeds in sweeps.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
