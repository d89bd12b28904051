//! Seeded, splittable random source.
//!
//! ChaCha8 keyed by a 64-bit seed; independent sub-streams are selected with
//! the cipher's stream counter, so the same `(seed, stream)` pair always
//! produces the same sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type InstanceRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> InstanceRng {
    stream_rng(seed, 0)
}

pub fn stream_rng(seed: u64, stream: u64) -> InstanceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
