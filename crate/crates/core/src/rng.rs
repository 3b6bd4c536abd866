//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(seed, domain, index)`. The key is derived from `seed` and `domain`; the
//! 64-bit stream id is `index`. A sample's randomness therefore depends only
//! on its address, never on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep unrelated consumers of the same user seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    TailSample = 1,
    CodeSample = 2,
    DensitySample = 3,
}

pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(domain as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
