//! Seeded randomness.
//!
//! The generator is PCG64 (`Lcg128Xsl64`: 128-bit LCG, XSL-RR output) from
//! `rand_pcg`. A `u64` seed is expanded with SplitMix64 into the 128-bit
//! state and stream. Uniforms take the top 53 bits of one output, so every
//! draw is reproducible from the seed in any language that implements PCG64.

use rand_core::RngCore;
use rand_pcg::Pcg64;

use crate::real::Real;

pub type Rng = Pcg64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step: advances `state` and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded(seed: u64) -> Rng {
    let mut s = seed;
    let words: Vec<u128> = (0..4).map(|_| splitmix64(&mut s) as u128).collect();
    let state = (words[0] << 64) | words[1];
    let stream = (words[2] << 64) | words[3];
    Pcg64::new(state, stream)
}

/// Seed for replica `r` of a harness seeded with `seed`. Depends only on
/// `(seed, r)`, so a replica's stream is unaffected by the others.
pub fn replica_seed(seed: u64, replica: usize) -> u64 {
    let mut s = seed.wrapping_add((replica as u64).wrapping_add(1).wrapping_mul(GOLDEN));
    splitmix64(&mut s)
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn uniform01(g: &mut Rng) -> f64 {
    (g.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF lookup: the first index whose cumulative mass exceeds `u`.
/// Zero-mass coordinates are never returned. Falls back to the last
/// positive coordinate when round-off leaves the total just below `u`.
pub fn sample_with_uniform<T: Real>(dist: &[T], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, p) in dist.iter().enumerate() {
        let p = p.to_f64();
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Draw an index with probability `dist[i]` using one uniform.
pub fn sample_categorical<T: Real>(dist: &[T], g: &mut Rng) -> usize {
    sample_with_uniform(dist, uniform01(g))
}
