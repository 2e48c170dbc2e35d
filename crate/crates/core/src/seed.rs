//! Seed expansion and the declared random streams.
//!
//! Every random object in the crate is drawn from a ChaCha8 stream whose
//! 256-bit key is expanded from a 64-bit seed with SplitMix64. Child seeds are
//! derived by mixing a parent seed with a tag through the SplitMix64 finalizer:
//!
//! ```text
//! mix64(z):   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//!             z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//!             z ^ (z >> 31)
//! derive(seed, tag) = mix64(seed + 0x9e3779b97f4a7c15 * (tag + 1))   (wrapping)
//! ```
//!
//! Bounded integers use 64-bit rejection sampling (`x < 2^64 - 2^64 mod b`,
//! then `x mod b`) and unit floats take the top 53 bits of one 64-bit word.
//! Together these make every table and every measurement outcome a pure
//! function of the seeds, independent of the `rand` version in use.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifier recorded in reports so runs can be reproduced elsewhere.
pub const PRNG_ID: &str = "chacha8 keyed by splitmix64(seed); tags mixed with splitmix64 finalizer";

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `seed` and a tag.
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix64(seed.wrapping_add(GOLDEN.wrapping_mul(tag.wrapping_add(1))))
}

/// Folds a sequence of tags into `seed`, left to right.
pub fn derive_path(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(seed, |s, &t| derive(s, t))
}

/// Opens the ChaCha8 stream for a 64-bit seed.
pub fn stream(seed: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform integer in `0..bound` by rejection. `bound` must be nonzero.
pub fn below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

/// Uniform float in `[0, 1)` with 53 bits of precision.
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A uniformly random permutation of `0..len` by Fisher-Yates over the stream.
pub fn fisher_yates(rng: &mut impl RngCore, len: usize) -> Vec<u32> {
    assert!(len as u64 <= 1 << 32);
    let mut table: Vec<u32> = (0..len as u64).map(|v| v as u32).collect();
    for i in (1..len).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        table.swap(i, j);
    }
    table
}
