//! Simulation studies, Monte Carlo property checks and CSV output.

mod config;
mod experiment;
mod io;
mod properties;
pub mod stats;

pub use config::{ConfigFile, DEFAULT_GRID_MAX, DEFAULT_GRID_MIN, DEFAULT_GRID_POINTS, DEFAULT_N, DEFAULT_SEEDS};
pub use experiment::{
    aggregate_rows, run_figure_experiment, run_oracle_start_experiment, Aggregate, ExperimentRecord, ExperimentSpec,
    GridRow, Mode, SeedSelection, SizeSummary,
};
pub use io::{
    read_grid_rows, read_increments, write_aggregates, write_bound_curves, write_cf_curves, write_grid_rows,
    write_increments, write_property_report, write_selections, write_summary, write_trace, CsvOptions,
};
pub use properties::{
    run_property_suite, run_property_suite_with, CheckResult, PropertyFloors, PropertyReport, BOUND_CHECK,
    DECOMPOSITION_CHECK, ENVELOPE_MONOTONE_CHECK, ENVELOPE_OPTIMUM_CHECK, TRUNCATION_CHECK,
};

use crate::error::Result;
use crate::levy_sim::{Axis, LevyModel, Matrix2, StableComponent};

/// Brownian covariance of the reference model, `C¹² = 1`.
pub const REFERENCE_COV: Matrix2 = [[2.0, 1.0], [1.0, 1.0]];
/// Scale of each stable component of the reference model.
pub const REFERENCE_SCALE: f64 = 0.3;

/// Reference model: covariance [`REFERENCE_COV`], zero drift, stable
/// components of index `r1` on the first axis and `r2` on the second.
pub fn reference_model(r1: f64, r2: f64) -> Result<LevyModel> {
    LevyModel::new(
        REFERENCE_COV,
        [0.0, 0.0],
        vec![
            StableComponent::new(r1, REFERENCE_SCALE, Axis::First)?,
            StableComponent::new(r2, REFERENCE_SCALE, Axis::Second)?,
        ],
    )
}
