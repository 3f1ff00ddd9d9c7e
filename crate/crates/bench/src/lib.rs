//! Fixtures shared by the benchmarks.

use levycov::harness::reference_model;
use levycov::{simulate_increments, BalancingConfig, FrequencyGrid, IncrementSample, LevyModel, SimulationConfig};

/// Reference model with stable indices `(0.5, 1.5)`.
pub fn model() -> LevyModel {
    reference_model(0.5, 1.5).expect("reference model is valid")
}

/// Seeded sample of `n` increments from [`model`].
pub fn sample(n: usize) -> IncrementSample {
    simulate_increments(&model(), &SimulationConfig::new(n, 1).expect("n >= 2")).expect("simulation succeeds")
}

/// Log-spaced grid on `[0.1, 50]`.
pub fn grid(points: usize) -> FrequencyGrid {
    FrequencyGrid::log_spaced(0.1, 50.0, points).expect("valid grid")
}

pub fn selector() -> BalancingConfig {
    BalancingConfig::default()
}
