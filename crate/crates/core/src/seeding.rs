//! Deterministic derivation of per-task RNG substreams.
//!
//! Every simulation unit (one replicate, one trial, one simplex sample)
//! gets its own generator, seeded from the master seed plus a tag path.
//! Results are therefore independent of thread count and scheduling: the
//! stream a unit sees depends only on its identity, not on which worker
//! happens to run it.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// splitmix64 finaliser; good avalanche, cheap, stable.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Collapse a master seed and a tag path into a single 64-bit value.
pub fn derive(master: u64, tags: &[u64]) -> u64 {
    let mut acc = mix(master);
    for &t in tags {
        acc = mix(acc ^ mix(t));
    }
    acc
}

/// Build the substream generator for `(master, tags)`.
///
/// The derived 64-bit value is expanded to the full 256-bit seed so
/// distinct tag paths land in unrelated parts of the cipher keyspace.
pub fn substream(master: u64, tags: &[u64]) -> ChaCha12Rng {
    let mut state = derive(master, tags);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = mix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}
