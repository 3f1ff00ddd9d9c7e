//! Monte Carlo checks of the high-probability statements behind the bounds.

use rayon::prelude::*;

use super::experiment::{ExperimentSpec, Mode};
use crate::adapt::oracle_start_theoretical;
use crate::cf_kernel::{ecf_pair, theoretical_cf_modulus, truncated_inverse, truncation_threshold, DiagonalFrequency};
use crate::error::{invalid, Result};
use crate::estimator::{
    cov_from_cf, error_decomposition_from_cf, monotone_envelope, optimal_u, stochastic_bound_emp, stochastic_bound_theo,
};
use crate::levy_sim::{simulate_increments, SimulationConfig};

pub const TRUNCATION_CHECK: &str = "truncation_interchange";
pub const BOUND_CHECK: &str = "bound_interchange";
pub const DECOMPOSITION_CHECK: &str = "error_decomposition";
pub const ENVELOPE_MONOTONE_CHECK: &str = "envelope_monotone";
pub const ENVELOPE_OPTIMUM_CHECK: &str = "envelope_at_optimal_u";

/// Minimum pass frequency per check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyFloors {
    pub truncation: f64,
    pub interchange: f64,
    pub decomposition: f64,
    pub envelope: f64,
}

impl Default for PropertyFloors {
    fn default() -> Self {
        Self {
            truncation: 0.95,
            interchange: 0.95,
            decomposition: 1.0,
            envelope: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub hits: usize,
    pub total: usize,
    pub floor: f64,
}

impl CheckResult {
    /// Pass frequency; 1 when the check had nothing to test.
    pub fn frequency(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.hits as f64 / self.total as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.frequency() >= self.floor
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub checks: Vec<CheckResult>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default, Clone, Copy)]
struct Counts {
    truncation: (usize, usize),
    interchange: (usize, usize),
    decomposition: (usize, usize),
}

impl Counts {
    fn add(self, o: Counts) -> Counts {
        let sum = |a: (usize, usize), b: (usize, usize)| (a.0 + b.0, a.1 + b.1);
        Counts {
            truncation: sum(self.truncation, o.truncation),
            interchange: sum(self.interchange, o.interchange),
            decomposition: sum(self.decomposition, o.decomposition),
        }
    }
}

pub fn run_property_suite(spec: &ExperimentSpec) -> Result<PropertyReport> {
    run_property_suite_with(spec, &PropertyFloors::default())
}

/// Frequencies over all seeds and grid points of:
///
/// - `||1/φ̃ₙ| - 1/|φₙ|| <= |1/φₙ|/2` where `|φₙ| >= 2κₙ n^{-1/2}`;
/// - `sₙ/2 <= s̃ₙ <= 3sₙ` on the same points;
/// - `|Ĉ¹²ₙ(U) - C¹²| <= |Hₙ(U)| + |D(U)|` everywhere;
/// - the envelope of `sₙ` from the model oracle start is nondecreasing and
///   agrees with `sₙ` at the grid point nearest `Uₙ`.
pub fn run_property_suite_with(spec: &ExperimentSpec, floors: &PropertyFloors) -> Result<PropertyReport> {
    if spec.mode != Mode::PropertySuite {
        return Err(invalid(
            "mode",
            format!("expected PropertySuite, spec has {:?}", spec.mode),
        ));
    }
    let model = &spec.model;
    let n = spec.n;
    let p = &spec.selector.bounds;
    let (tp, wp) = (p.truncation_params(), p.weight_params());
    let grid = spec.grid.points();
    let theo: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|&u| {
            (
                theoretical_cf_modulus(model, n, &DiagonalFrequency::diag(u)),
                truncation_threshold(n, u, &tp, &wp),
                stochastic_bound_theo(model, n, u, p),
            )
        })
        .collect();

    let counts = spec
        .seeds
        .par_iter()
        .map(|&seed| -> Result<Counts> {
            let sample = simulate_increments(model, &SimulationConfig::new(n, seed)?)?;
            let mut c = Counts::default();
            for (&u, &(phi, threshold, s_theo)) in grid.iter().zip(&theo) {
                let (d, a) = ecf_pair(&sample, u);
                if phi >= 2.0 * threshold {
                    let inv = truncated_inverse(&d, n, u, &tp, &wp).value;
                    c.truncation.1 += 1;
                    if (inv - 1.0 / phi).abs() <= 0.5 / phi {
                        c.truncation.0 += 1;
                    }
                    let s_emp = stochastic_bound_emp(&d, &a, n, u, p).value;
                    c.interchange.1 += 1;
                    if 0.5 * s_theo <= s_emp && s_emp <= 3.0 * s_theo {
                        c.interchange.0 += 1;
                    }
                }
                let est = cov_from_cf(n, u, &d, &a);
                let terms = error_decomposition_from_cf(model, n, u, &d, &a);
                let bound = terms.stochastic.abs() + terms.deterministic.abs();
                let tol = 1e-12 * (1.0 + est.value.abs() + bound);
                c.decomposition.1 += 1;
                if terms.degenerate || (est.value - model.c12()).abs() <= bound + tol {
                    c.decomposition.0 += 1;
                }
            }
            Ok(c)
        })
        .try_reduce(Counts::default, |a, b| Ok(a.add(b)))?;

    let start = oracle_start_theoretical(model, n, &spec.grid)?.index;
    let s_theo: Vec<f64> = theo.iter().map(|t| t.2).collect();
    let env = monotone_envelope(&s_theo, start);
    let monotone = env[start..].windows(2).all(|w| w[1] >= w[0]);
    let i_n = spec.grid.nearest_index(optimal_u(n, p.r, p.m));
    let at_optimum = i_n >= start && env[i_n] == s_theo[i_n];

    let check = |name, (hits, total): (usize, usize), floor| CheckResult {
        name,
        hits,
        total,
        floor,
    };
    Ok(PropertyReport {
        checks: vec![
            check(TRUNCATION_CHECK, counts.truncation, floors.truncation),
            check(BOUND_CHECK, counts.interchange, floors.interchange),
            check(DECOMPOSITION_CHECK, counts.decomposition, floors.decomposition),
            check(ENVELOPE_MONOTONE_CHECK, (monotone as usize, 1), floors.envelope),
            check(ENVELOPE_OPTIMUM_CHECK, (at_optimum as usize, 1), floors.envelope),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapt::{BalancingConfig, FrequencyGrid};
    use crate::harness::reference_model;

    #[test]
    fn small_suite_runs() {
        let spec = ExperimentSpec::new(
            reference_model(0.5, 1.5).unwrap(),
            500,
            500,
            FrequencyGrid::log_spaced(0.1, 50.0, 60).unwrap(),
            (0..5).collect(),
            Mode::PropertySuite,
            BalancingConfig::default(),
        )
        .unwrap();
        let report = run_property_suite(&spec).unwrap();
        assert_eq!(report.checks.len(), 5);
        let dec = report.check(DECOMPOSITION_CHECK).unwrap();
        assert_eq!(dec.total, 5 * 60);
        assert_eq!(dec.hits, dec.total);
        assert!(report.check(TRUNCATION_CHECK).unwrap().total > 0);
    }

    #[test]
    fn empty_check_counts_as_pass() {
        let c = CheckResult {
            name: "x",
            hits: 0,
            total: 0,
            floor: 1.0,
        };
        assert!(c.passed());
    }
}
