//! Named seed substreams.
//!
//! Every random consumer derives its own generator from the user seed, a
//! stream label and an index, so results never depend on the order in which
//! independent jobs are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub const BOOTSTRAP: &str = "bootstrap";
pub const CONFIDENCE_NONPARAMETRIC: &str = "confidence-np";
pub const CONFIDENCE_PARAMETRIC: &str = "confidence-p";
pub const SIMULATION: &str = "simulation";
pub const MODEL: &str = "model";
pub const HILL_CLIMB: &str = "hill-climb";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Mixes a seed with a label and an index into a new, decorrelated seed.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ fnv1a(label)) ^ splitmix64(index.wrapping_add(0x5851_f42d)))
}

pub fn substream(seed: u64, label: &str, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, label, index))
}
