//! Seeded random streams.
//!
//! Every run derives independent streams from one `u64` seed by selecting a
//! ChaCha8 stream id, so generation, soundness sampling and fingerprint probes
//! never perturb each other.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies the generator and derivation scheme in persisted output.
pub const PRNG_ID: &str = "chacha8/rand_chacha-0.3/seed_from_u64+set_stream/v1";

pub type Rng = ChaCha8Rng;

pub const STREAM_GENERATOR: u64 = 0;
pub const STREAM_SOUNDNESS: u64 = 1;
pub const STREAM_PROBES: u64 = 2;
pub const STREAM_BOOTSTRAP: u64 = 3;
pub const STREAM_FOLDS: u64 = 4;
pub const STREAM_NOISE: u64 = 5;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
