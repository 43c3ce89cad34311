//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream selected
//! by `(seed, stream index)`, so the value of a matrix entry or a Monte Carlo
//! replica never depends on evaluation order or on the number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer, used to derive child seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replica `index` of a run started from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Seed for an independent purpose-tagged stream family (e.g. the GUE part
/// of a deformed matrix).
pub fn tagged_seed(seed: u64, tag: &str) -> u64 {
    let h = tag
        .bytes()
        .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
    mix64(seed ^ h)
}

/// Stream dedicated to the matrix entry at `(row, col)`.
pub fn entry_stream(seed: u64, row: usize, col: usize) -> ChaCha8Rng {
    stream(seed, ((row as u64) << 32) | col as u64)
}

/// Stream number `index` of the family keyed by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A keyed stream family with the key expansion done once; `at(i)` yields
/// the same generator as `stream(seed, i)`.
#[derive(Clone)]
pub struct StreamFamily(ChaCha8Rng);

impl StreamFamily {
    pub fn new(seed: u64) -> Self {
        StreamFamily(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn at(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.0.clone();
        rng.set_stream(index);
        rng
    }

    pub fn entry(&self, row: usize, col: usize) -> ChaCha8Rng {
        self.at(((row as u64) << 32) | col as u64)
    }
}
