//! Deterministic per-task random number streams.
//!
//! Every stochastic object in this crate is generated from a ChaCha8 stream
//! whose 256-bit key is derived from `(master_seed, stream_index, tag)` by
//! the fixed mixing function below. Streams with distinct `(index, tag)`
//! pairs are statistically independent, and a stream's output depends only
//! on its triple, never on scheduling or worker count.
//!
//! Mixing function: seed a SplitMix64 generator with
//! `master_seed XOR (index * 0x9E3779B97F4A7C15) XOR (tag * 0xD1B54A32D192ED03)`
//! and take four successive outputs as the little-endian ChaCha key.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain-separation tags for the stream families used by experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    /// Path simulation draws (Brownian increments, BESQ noise).
    Path,
    /// The standard Gaussian factor of the mixed-Gaussian limit sample.
    Limit,
}

impl StreamTag {
    fn value(self) -> u64 {
        match self {
            StreamTag::Path => 0,
            StreamTag::Limit => 1,
        }
    }
}

/// One step of SplitMix64 (Steele, Lea, Flood 2014).
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive the 32-byte ChaCha key for stream `(master_seed, index, tag)`.
pub fn stream_key(master_seed: u64, index: u64, tag: StreamTag) -> [u8; 32] {
    let mut state = master_seed
        ^ index.wrapping_mul(0x9E3779B97F4A7C15)
        ^ tag.value().wrapping_mul(0xD1B54A32D192ED03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// The ChaCha8 stream for `(master_seed, index, tag)`.
pub fn stream_rng(master_seed: u64, index: u64, tag: StreamTag) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_key(master_seed, index, tag))
}
