//! Deterministic random streams.
//!
//! Trial `j` of a run seeded with `s` draws from ChaCha8 seeded with `s` on
//! stream `j`, so results do not depend on how trials are spread over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
