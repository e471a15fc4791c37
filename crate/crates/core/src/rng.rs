//! Seeded random streams.
//!
//! Every random decision draws from a ChaCha8 stream keyed by
//! `(master seed, purpose, a, b)`. The NSGA-II loop uses
//! `(seed, OFFSPRING, generation, child)` for each offspring and
//! `(seed, INIT, 0, member)` for each initial member, so results do not
//! depend on the order in which work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream purposes. The values are part of the reproducibility contract.
pub mod purpose {
    pub const INIT: u64 = 1;
    pub const OFFSPRING: u64 = 2;
    pub const GREEDY_RUN: u64 = 3;
    pub const GENERATOR: u64 = 4;
    pub const SOGA_OFFSPRING: u64 = 5;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for `(seed, purpose, a, b)`.
pub fn substream(seed: u64, purpose: u64, a: u64, b: u64) -> Rng {
    let mut key = [0u8; 32];
    let mut h = splitmix(seed);
    for (i, part) in [purpose, a, b, 0x5EED].into_iter().enumerate() {
        h = splitmix(h ^ part.wrapping_mul(0xA24B_AED4_963E_E407));
        key[i * 8..i * 8 + 8].copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
