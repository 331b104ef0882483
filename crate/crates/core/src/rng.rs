//! Seeded random streams.
//!
//! Every randomized computation derives its generator from a base seed and a
//! list of integer tags (a domain tag plus indices such as shell, replica or
//! level). Streams for different tags are independent for practical purposes,
//! so results do not depend on iteration order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags.
pub mod tag {
    pub const SHELL: u64 = 0x5348_454c_4c00_0001;
    pub const THIN: u64 = 0x5448_494e_0000_0002;
    pub const TIE: u64 = 0x5449_4500_0000_0003;
    pub const RENORM: u64 = 0x5245_4e4f_524d_0004;
    pub const WALK: u64 = 0x5741_4c4b_0000_0005;
    pub const REPLICA: u64 = 0x5245_504c_0000_0006;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a seed with a sequence of tags into a single 64-bit seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut h = splitmix64(seed);
    for &t in tags {
        h = splitmix64(h ^ splitmix64(t));
    }
    h
}

pub fn substream(seed: u64, tags: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}
