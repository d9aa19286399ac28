//! Named random streams derived from one root seed.
//!
//! Every stage draws from its own ChaCha20 stream keyed by the root seed, so changing the
//! number of synthetic points never perturbs the reduced space and vice versa.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Stream {
    ReducedSpace,
    Sampling,
    /// Redraw number `i >= 1` of the reduced space after a conditioning failure.
    Retry(u32),
}

impl Stream {
    /// ChaCha stream identifier.
    pub fn id(self) -> u64 {
        match self {
            Stream::ReducedSpace => 1,
            Stream::Sampling => 2,
            Stream::Retry(i) => 0x100 + i as u64,
        }
    }

    /// Stream used for reduced-space attempt `attempt` (0 is the first draw).
    pub fn reduced_space_attempt(attempt: u32) -> Stream {
        if attempt == 0 {
            Stream::ReducedSpace
        } else {
            Stream::Retry(attempt)
        }
    }
}

pub fn stream_rng(root_seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(root_seed);
    rng.set_stream(stream.id());
    rng
}
