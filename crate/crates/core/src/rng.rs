//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha stream keyed by a
//! `(seed, stream)` pair, so trial `i` of a run can be replayed on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
