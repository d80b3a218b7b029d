//! Seed derivation: one master seed fans out into named, indexed sub-streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named randomness sub-streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Generation,
    Pivot,
    Experiment,
    Other(u64),
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Generation => 0x6765_6e65_7261_7465,
            Stream::Pivot => 0x7069_766f_7400_0000,
            Stream::Experiment => 0x6578_7065_7269_6d74,
            Stream::Other(t) => t,
        }
    }
}

/// One step of the splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for item `index` of `stream` under `master`.
pub fn derive(master: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream.tag()) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
