//! Deterministic random streams for parallel replications.
//!
//! Every replication draws from its own ChaCha stream, selected by
//! `(master seed, replication index)`. Streams with distinct indices are
//! independent, and a replication is bit-reproducible because the simulator
//! draws in a fixed order: arrival gap, then the server subset, then service
//! times in ascending queue-index order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The uniform random stream handed to simulators.
pub type Stream = ChaCha8Rng;

/// Factory deriving per-replication streams from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamFactory {
    seed: u64,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        StreamFactory { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream for one replication index.
    pub fn stream(&self, replication: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication);
        rng
    }
}
