//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha stream addressed by
//! `(seed, replication, tag)`, so a replication produces the same numbers
//! whichever thread runs it and in whatever order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 20_091_215;

/// Purpose of a stream within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    Design = 0,
    Noise = 1,
    Aux = 2,
}

pub fn stream(seed: u64, replication: u64, tag: StreamTag) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication.wrapping_mul(4).wrapping_add(tag as u64));
    rng
}
