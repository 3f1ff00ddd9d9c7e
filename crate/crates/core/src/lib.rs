//! Estimation of the off-diagonal Brownian covariance `C¹²` of a bivariate
//! Lévy process from high-frequency increments.
//!
//! The crate has five layers:
//!
//! - [`levy_sim`]: seeded simulation of Brownian plus axis-loaded symmetric
//!   stable increments.
//! - [`cf_kernel`]: empirical, theoretical and truncated characteristic
//!   functions on the diagonal `(U, U)` and anti-diagonal `(U, -U)`.
//! - [`estimator`]: the spectral estimator `Ĉ¹²ₙ(U)` with its stochastic and
//!   deterministic error bounds.
//! - [`adapt`]: oracle start, Lepskiĭ stopping rules and the balancing
//!   principle for choosing `U` from data.
//! - [`harness`]: experiment specs, Monte Carlo property checks and CSV output.

pub mod adapt;
pub mod cf_kernel;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod levy_sim;

pub use adapt::{
    adaptive_estimate, adaptive_estimate_with, balancing_select, lepskii_stop_rule, lepskii_stop_rule_rates,
    oracle_start_empirical, oracle_start_interval, select_in_range, u_bal_theoretical, AdaptiveOutcome,
    BalancingConfig, Comparison, FrequencyGrid, OracleStart, SelectionMethod, SelectionResult,
};
pub use cf_kernel::{
    ecf, kappa_n, theoretical_cf_modulus, truncated_inverse, weight, CfValue, DiagonalFrequency, Orientation,
    TruncatedInverse, TruncationParams, WeightParams,
};
pub use error::{Error, Result};
pub use estimator::{
    deterministic_bound, minimax_rate, monotone_envelope, optimal_u, spectral_cov, BoundCurves, BoundParams,
    CovEstimate, ErrorTerms, GridPoint,
};
pub use levy_sim::{simulate_increments, Axis, IncrementSample, LevyModel, Matrix2, SimulationConfig, StableComponent};
