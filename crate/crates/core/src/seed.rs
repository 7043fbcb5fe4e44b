//! Seed splitting for reproducible parallel work.
//!
//! Every task derives its own seed from one root seed with
//! `derive(root, stream, index) = splitmix64(root ^ splitmix64(stream ^ splitmix64(index)))`,
//! so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of the SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream ^ splitmix64(index)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
