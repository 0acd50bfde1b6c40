//! Simulation and verification engine for moments in space of the
//! increments of Brownian local time.
//!
//! The crate has four layers:
//!
//! * [`hermite`] — exact integer combinatorics: Bessel numbers of the
//!   second kind, Hermite polynomials and the limit constants `c_q`.
//! * [`path_sim`] — Brownian paths, the binned local-time field, and the
//!   BESQ(0) field for stopping-time experiments.
//! * [`iterated`] / [`stats`] — discrete iterated integrals with the
//!   Kailath-Segall verification routines, and the increment-moment
//!   statistic `S_q(h)` with its compensator `R_{q,h}` and normalization
//!   `T_q(h)`.
//! * [`montecarlo`] — replicated distributional experiments comparing
//!   `T_q(h)` against the paired mixed-Gaussian limit sample.
//!
//! All stochastic output is a pure function of `(configuration, seed)`;
//! see [`rng`] for the stream derivation.

/// Crate version, echoed into experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod error;
pub mod hermite;
pub mod iterated;
pub mod montecarlo;
pub mod path_sim;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use hermite::{
    bessel_number, hermite_eval, kailath_segall_expansion, limit_constant, limit_constant_sq,
    scaled_hermite_eval, BesselTable, HermiteExpansion,
};
pub use iterated::{
    build_ladder, check_kailath_segall_continuous, check_newton_identity, DiscretizedMartingale,
    IteratedIntegralLadder,
};
pub use montecarlo::{
    conjecture_probe, expectation_scan, ks_two_sample, run_experiment, run_with_generator,
    ConjectureRow, ExpectationRow, ExperimentConfig, ExperimentMode, ExperimentReport,
    FieldGenerator, HSummary, PathRecord, PathStatistic, SimulatedField,
};
pub use path_sim::{
    local_time_field, simulate_besq0, simulate_brownian, BesqZeroField, BrownianPath,
    LocalTimeField,
};
pub use stats::{
    compensator, compensator_scale, compensator_terms, increment_moment, normalized_statistic,
    SpatialField, StatisticRequest, StatisticResult,
};
