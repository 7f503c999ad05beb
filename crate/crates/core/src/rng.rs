//! Named, independent random streams derived from one seed.
//!
//! Each stream is a ChaCha8 generator keyed by the run seed with its own
//! stream id, so draws on one stream never shift another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Channel,
    Requests,
    Tasks,
    PolicyInit,
    PolicySample,
    Baseline,
    Update,
}

impl Stream {
    pub const ALL: [Stream; 7] = [
        Stream::Channel,
        Stream::Requests,
        Stream::Tasks,
        Stream::PolicyInit,
        Stream::PolicySample,
        Stream::Baseline,
        Stream::Update,
    ];

    fn id(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Debug, Clone)]
pub struct RngStreams {
    seed: u64,
    streams: [ChaCha8Rng; 7],
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            streams: Stream::ALL.map(|s| Self::fresh(seed, s)),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn get(&mut self, s: Stream) -> &mut ChaCha8Rng {
        &mut self.streams[s as usize]
    }

    /// A standalone generator for `s`, positioned at the start of the stream.
    pub fn fresh(seed: u64, s: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s.id());
        rng
    }
}
