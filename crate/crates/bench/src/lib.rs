//! Shared inputs for the criterion benches.

use plankforge::datagen::{gen_samples, GenConfig, Sample};

/// A fixed corpus so bench numbers are comparable across runs.
pub fn corpus(n: usize) -> Vec<Sample> {
    gen_samples(n, &GenConfig { seed: 2024, ..GenConfig::default() }).expect("corpus")
}
