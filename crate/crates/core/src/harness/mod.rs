//! Experiment plumbing shared by the `sumprod` binary and the test suites:
//! seeded instance sampling, set files, invariant suites and reports.

pub mod commands;
pub mod generate;
pub mod report;
pub mod sample;
pub mod setfile;
pub mod suites;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier written into every report for the generator below.
pub const RNG_ID: &str = "chacha8-stream-v1";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// ChaCha8 seeded from `seed`, on stream `trial`: trials draw from disjoint
/// substreams, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
