//! Reproducible per-trial random streams.
//!
//! Every trial of every experiment owns a stream derived purely from
//! `(master seed, trial index)`, so results are independent of execution
//! order and parallel runs tally identically to sequential ones.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout; ChaCha with an explicit stream id per trial.
pub type TrialRng = ChaCha8Rng;

/// Derives the random stream for one trial. Pure function of its inputs;
/// distinct indices select statistically independent ChaCha streams.
pub fn derive_stream(master_seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Mixes a tag into a master seed for nested experiments (sweep rows,
/// verification stages) that each need their own trial-index space.
pub fn sub_seed(master_seed: u64, tag: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(tag))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
