//! Shared fixtures for the benchmarks.

use ildars::simulation::{apply_errors, generate_measurements, make_cube_room, place_senders};
use ildars::{ErrorConfig, Measurement};

/// One noisy measurement set in the 2 m cube with default error parameters.
pub fn noisy_measurements(senders: usize, seed: u64) -> Vec<Measurement> {
    let room = make_cube_room(2.0).expect("valid side");
    let truth = place_senders(&room, senders, seed).expect("room has space");
    let cfg = ErrorConfig {
        rng_seed: seed,
        ..ErrorConfig::default()
    };
    apply_errors(&generate_measurements(&truth), &cfg).expect("default config is valid")
}
