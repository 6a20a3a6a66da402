//! Seeded generators. Every random decision in the crate draws from a ChaCha8
//! stream derived from a user seed, so outputs are reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a seed with a tag and index into a fresh seed (splitmix64 finalizer
/// over an FNV-1a hash of the tag).
pub fn derive(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed
        .wrapping_add(h)
        .wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `ceil(x)` that ignores float noise just above an integer, so that e.g.
/// `10.0 / 0.1` yields 100 rather than 101.
pub fn ceil_tol(x: f64) -> usize {
    let tol = 1e-9 * x.abs().max(1.0);
    let c = (x - tol).ceil();
    if c <= 0.0 {
        0
    } else {
        c as usize
    }
}
