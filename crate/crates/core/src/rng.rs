//! Seed derivation.
//!
//! Every random quantity in the crate descends from one 64-bit master seed.
//! Per-item seeds come from a SplitMix64 finalizer over `(master, stream,
//! index)`, so items are independent of each other and of generation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags keep seeds drawn for different purposes apart.
pub mod stream {
    pub const ITEM: u64 = 0x1;
    pub const SPLIT: u64 = 0x2;
    pub const SUBSAMPLE: u64 = 0x3;
    pub const TRANSFORM: u64 = 0x4;
    pub const FOLDS: u64 = 0x5;
    pub const TEST_SET: u64 = 0x6;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(master ^ splitmix64(stream));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
