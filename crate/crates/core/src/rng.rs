//! Seeding.
//!
//! All randomness comes from ChaCha8 generators, which produce the same
//! stream on every platform. A campaign has one root seed; the seed of any
//! sub-run is obtained by folding a path of indices into it with SplitMix64:
//!
//! ```text
//! h = root
//! for x in path: h = splitmix64(h ^ splitmix64(x + 0x9E3779B97F4A7C15))
//! ```
//!
//! `minimize_k` uses path `[k]` per color budget, `bench` uses
//! `[entry, repetition]`, experiments use `[repetition]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(root, |h, &x| splitmix64(h ^ splitmix64(x.wrapping_add(0x9E37_79B9_7F4A_7C15))))
}

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform index in `0..len`, sampled through `u32` so the stream does not
/// depend on the width of `usize`.
#[inline]
pub fn index<R: Rng + ?Sized>(rng: &mut R, len: usize) -> usize {
    debug_assert!(len > 0 && len <= u32::MAX as usize);
    rng.gen_range(0..len as u32) as usize
}

/// Reservoir step for uniform tie-breaking: call with the running number of
/// tied candidates seen so far (including the new one); returns true when
/// the new candidate should replace the current pick.
#[inline]
pub fn take_tie<R: Rng + ?Sized>(rng: &mut R, ties_seen: u32) -> bool {
    ties_seen <= 1 || rng.gen_range(0..ties_seen) == 0
}
