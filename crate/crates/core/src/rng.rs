//! Named, counter-derived random substreams.
//!
//! Every random draw in a run descends from one master seed through a chain of
//! labels (`"generate"`, run index, try index, ...). A substream depends only
//! on its label path, never on the order in which other substreams are used,
//! so parallel and sequential execution draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Substream {
    key: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3))
}

impl Substream {
    pub fn root(seed: u64) -> Self {
        Self { key: splitmix64(seed) }
    }

    /// Child stream addressed by an integer counter.
    pub fn index(self, i: u64) -> Self {
        Self { key: splitmix64(self.key ^ splitmix64(i.wrapping_add(0x5851_F42D_4C95_7F2D))) }
    }

    /// Child stream addressed by a name.
    pub fn named(self, label: &str) -> Self {
        Self { key: splitmix64(self.key ^ fnv1a(label)) }
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key)
    }

    pub fn key(self) -> u64 {
        self.key
    }
}
