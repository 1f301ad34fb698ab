//! Seeded random streams keyed by `(run, node, purpose)`.
//!
//! Every consumer of randomness asks for its own stream. The key never
//! includes the network size, so node `DRN3` in run 2 sees the same draws
//! whether the scenario has 5 pairs or 120.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::topology::{NodeId, Role};

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Placement,
    LineOfSight,
    Shadowing,
    StartJitter,
    RfidDelay,
    /// Free-form tag for tests and tools.
    Custom(u32),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Placement => 1,
            Purpose::LineOfSight => 2,
            Purpose::Shadowing => 3,
            Purpose::StartJitter => 4,
            Purpose::RfidDelay => 5,
            Purpose::Custom(c) => 0x1_0000_0000 | c as u64,
        }
    }
}

/// Identity of one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub run_index: u32,
    pub node: NodeId,
    pub purpose: Purpose,
}

impl StreamKey {
    pub fn new(run_index: u32, node: NodeId, purpose: Purpose) -> Self {
        StreamKey {
            run_index,
            node,
            purpose,
        }
    }
}

/// Factory for independent, reproducible generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    root_seed: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(root_seed: u64) -> Self {
        RngStream { root_seed }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    /// Derives the generator for `key`.
    pub fn stream(&self, key: StreamKey) -> ChaCha8Rng {
        let role = match key.node.role {
            Role::Enb => 0u64,
            Role::Drn => 1,
            Role::Lco => 2,
        };
        let words = [
            self.root_seed,
            key.run_index as u64,
            role,
            key.node.index as u64,
            key.purpose.tag(),
        ];
        // Absorb the key into a splitmix state, then squeeze 32 seed bytes.
        let mut state = 0u64;
        for w in words {
            state ^= w;
            state = splitmix64(&mut state);
        }
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}
