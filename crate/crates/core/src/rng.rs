//! Seeded random streams.
//!
//! Every randomized operation takes an explicit stream. Parallel Monte Carlo
//! code derives one stream per work item from a master seed and an index path,
//! so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for a master seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(splitmix64(seed))
}

/// Stream derived from a master seed and an index path, e.g. `(t, j)` for a
/// trajectory or `(n_index, trial)` for a Monte Carlo trial.
pub fn derived(seed: u64, path: &[u64]) -> Stream {
    let mut h = splitmix64(seed);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    ChaCha8Rng::seed_from_u64(h)
}
