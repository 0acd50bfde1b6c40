//! Shared fixtures for the criterion benchmarks.

use loctime_core::iterated::DiscretizedMartingale;
use loctime_core::path_sim::{local_time_field, simulate_brownian, BrownianPath, LocalTimeField};

/// A canonical desk-scale path: t = 1, dt = 1e-4.
pub fn fixture_path(seed: u64) -> BrownianPath {
    simulate_brownian(1.0, 1e-4, seed).expect("valid parameters")
}

/// The binned field of [`fixture_path`] at the default bin width.
pub fn fixture_field(seed: u64) -> LocalTimeField {
    local_time_field(&fixture_path(seed), 0.01).expect("valid parameters")
}

/// A martingale view of a 1e4-step path for ladder benchmarks.
pub fn fixture_martingale(seed: u64) -> DiscretizedMartingale {
    DiscretizedMartingale::from_brownian(&fixture_path(seed))
}
