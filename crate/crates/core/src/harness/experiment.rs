//! Simulation studies over many seeds: estimate curves and adaptive runs.

use num_complex::Complex64;
use rayon::prelude::*;

use super::stats::{mad, mean, median, quantile};
use crate::adapt::{adaptive_estimate, u_bal_theoretical, BalancingConfig, FrequencyGrid, SelectionMethod};
use crate::error::{invalid, Result};
use crate::estimator::stochastic_bound_theo;
use crate::levy_sim::{simulate_increments, LevyModel, SimulationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Figure,
    OracleStart,
    PropertySuite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub model: LevyModel,
    pub n: usize,
    /// Second sample size of oracle-start runs.
    pub compare_n: usize,
    pub grid: FrequencyGrid,
    pub seeds: Vec<u64>,
    pub mode: Mode,
    pub selector: BalancingConfig,
}

impl ExperimentSpec {
    pub fn new(
        model: LevyModel,
        n: usize,
        compare_n: usize,
        grid: FrequencyGrid,
        seeds: Vec<u64>,
        mode: Mode,
        selector: BalancingConfig,
    ) -> Result<Self> {
        model.validate()?;
        selector.validate()?;
        SimulationConfig::new(n, 0)?;
        SimulationConfig::new(compare_n, 0)?;
        if seeds.is_empty() {
            return Err(invalid("seeds", "need at least one seed"));
        }
        Ok(Self {
            model,
            n,
            compare_n,
            grid,
            seeds,
            mode,
            selector,
        })
    }

    fn expect_mode(&self, mode: Mode) -> Result<()> {
        if self.mode == mode {
            Ok(())
        } else {
            Err(invalid("mode", format!("expected {mode:?}, spec has {:?}", self.mode)))
        }
    }
}

/// One `(n, seed, U)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub n: usize,
    pub seed: u64,
    pub u: f64,
    pub phi_diag: Complex64,
    pub phi_anti: Complex64,
    pub log_mod_diag: f64,
    pub log_mod_anti: f64,
    /// `log|φ̂ₙ(ũ)| - log|φ̂ₙ(u)|`.
    pub log_diff: f64,
    pub estimate: f64,
    pub degenerate: bool,
    pub s_theo: f64,
    pub s_emp: f64,
    /// Inside the range the selector ran on.
    pub admissible: bool,
}

/// Adaptive selection for one `(n, seed)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSelection {
    pub n: usize,
    pub seed: u64,
    pub method: SelectionMethod,
    pub index: usize,
    pub u: f64,
    pub estimate: f64,
    pub u_start: f64,
    pub saturated: bool,
    pub u_bal: f64,
    /// `5 s̃ₙ(U_bal)` on the admissible range.
    pub bound: f64,
    pub probability_floor: f64,
}

impl SeedSelection {
    pub fn error_within_bound(&self, truth: f64) -> bool {
        (self.estimate - truth).abs() <= self.bound
    }
}

/// Cross-seed statistics of `Ĉ¹²ₙ(U)` at one `(n, U)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub u: f64,
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    pub seeds: usize,
    pub median_estimate: f64,
    pub mad_estimate: f64,
    pub median_u_start: f64,
    pub saturated: usize,
    /// Fraction of seeds with `|Ĉ - C¹²| <= 5 s̃ₙ(U_bal)`.
    pub bound_frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub mode: Mode,
    pub rows: Vec<GridRow>,
    pub selections: Vec<SeedSelection>,
    pub aggregates: Vec<Aggregate>,
}

impl ExperimentRecord {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.selections.iter().map(|s| s.n).collect();
        sizes.dedup();
        sizes
    }

    pub fn selections_for(&self, n: usize) -> Vec<SeedSelection> {
        self.selections.iter().copied().filter(|s| s.n == n).collect()
    }

    pub fn summary(&self, n: usize, truth: f64) -> SizeSummary {
        let sel = self.selections_for(n);
        let estimates: Vec<f64> = sel.iter().map(|s| s.estimate).collect();
        let starts: Vec<f64> = sel.iter().map(|s| s.u_start).collect();
        let hits = sel.iter().filter(|s| s.error_within_bound(truth)).count();
        SizeSummary {
            n,
            seeds: sel.len(),
            median_estimate: median(&estimates),
            mad_estimate: mad(&estimates),
            median_u_start: median(&starts),
            saturated: sel.iter().filter(|s| s.saturated).count(),
            bound_frequency: hits as f64 / sel.len().max(1) as f64,
        }
    }

    /// `(U, median)` of the aggregate curve at sample size `n` within `[lo, hi]`.
    pub fn median_curve(&self, n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.aggregates
            .iter()
            .filter(|a| a.n == n && a.u >= lo && a.u <= hi)
            .map(|a| (a.u, a.median))
            .collect()
    }
}

/// Per-`(n, U)` statistics over seeds. Rows must be grouped by `n` then seed, in grid order.
pub fn aggregate_rows(rows: &[GridRow]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let n = rows[start].n;
        let end = start + rows[start..].iter().take_while(|r| r.n == n).count();
        let block = &rows[start..end];
        let first_seed = block[0].seed;
        let width = block.iter().take_while(|r| r.seed == first_seed).count();
        for k in 0..width {
            let values: Vec<f64> = block.iter().skip(k).step_by(width).map(|r| r.estimate).collect();
            out.push(Aggregate {
                n,
                u: block[k].u,
                mean: mean(&values),
                median: median(&values),
                q25: quantile(&values, 0.25),
                q75: quantile(&values, 0.75),
            });
        }
        start = end;
    }
    out
}

fn run_size(spec: &ExperimentSpec, n: usize) -> Result<(Vec<GridRow>, Vec<SeedSelection>)> {
    let p = &spec.selector.bounds;
    let u_bal = u_bal_theoretical(n, p.r, p.m, p.big_c, p.kappa);
    let s_theo: Vec<f64> = spec
        .grid
        .points()
        .iter()
        .map(|&u| stochastic_bound_theo(&spec.model, n, u, p))
        .collect();

    let per_seed: Vec<(Vec<GridRow>, SeedSelection)> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            let sample = simulate_increments(&spec.model, &SimulationConfig::new(n, seed)?)?;
            let out = adaptive_estimate(&sample, &spec.grid, &spec.selector)?;
            let rows = out
                .points
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let log_mod_diag = g.phi_diag.modulus().ln();
                    let log_mod_anti = g.phi_anti.modulus().ln();
                    GridRow {
                        n,
                        seed,
                        u: g.u,
                        phi_diag: g.phi_diag.value,
                        phi_anti: g.phi_anti.value,
                        log_mod_diag,
                        log_mod_anti,
                        log_diff: log_mod_anti - log_mod_diag,
                        estimate: g.estimate.value,
                        degenerate: g.estimate.degenerate,
                        s_theo: s_theo[i],
                        s_emp: g.bound.value,
                        admissible: (out.start..=out.end).contains(&i),
                    }
                })
                .collect();
            let selection = SeedSelection {
                n,
                seed,
                method: out.selection.method,
                index: out.selection.index,
                u: out.selection.u,
                estimate: out.selection.estimate,
                u_start: out.oracle.u_start,
                saturated: out.oracle.saturated,
                u_bal,
                bound: out.balancing_error_bound(u_bal),
                probability_floor: out.probability_floor,
            };
            Ok((rows, selection))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(per_seed.len() * spec.grid.len());
    let mut selections = Vec::with_capacity(per_seed.len());
    for (r, s) in per_seed {
        rows.extend(r);
        selections.push(s);
    }
    Ok((rows, selections))
}

fn record(mode: Mode, parts: Vec<(Vec<GridRow>, Vec<SeedSelection>)>) -> ExperimentRecord {
    let mut rows = Vec::new();
    let mut selections = Vec::new();
    for (r, s) in parts {
        rows.extend(r);
        selections.extend(s);
    }
    ExperimentRecord {
        mode,
        aggregates: aggregate_rows(&rows),
        rows,
        selections,
    }
}

/// ECF, log-moduli and `Ĉ¹²ₙ(U)` for every seed and grid point at `spec.n`.
pub fn run_figure_experiment(spec: &ExperimentSpec) -> Result<ExperimentRecord> {
    spec.expect_mode(Mode::Figure)?;
    Ok(record(Mode::Figure, vec![run_size(spec, spec.n)?]))
}

/// Adaptive estimates with oracle start at `spec.n` and `spec.compare_n`.
pub fn run_oracle_start_experiment(spec: &ExperimentSpec) -> Result<ExperimentRecord> {
    spec.expect_mode(Mode::OracleStart)?;
    let mut parts = vec![run_size(spec, spec.n)?];
    if spec.compare_n != spec.n {
        parts.push(run_size(spec, spec.compare_n)?);
    }
    Ok(record(Mode::OracleStart, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::reference_model;

    fn small_spec(mode: Mode) -> ExperimentSpec {
        ExperimentSpec::new(
            reference_model(0.2, 0.1).unwrap(),
            300,
            600,
            FrequencyGrid::log_spaced(0.5, 40.0, 30).unwrap(),
            vec![1, 2, 3],
            mode,
            BalancingConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn figure_shapes() {
        let spec = small_spec(Mode::Figure);
        let rec = run_figure_experiment(&spec).unwrap();
        assert_eq!(rec.rows.len(), 3 * 30);
        assert_eq!(rec.aggregates.len(), 30);
        assert_eq!(rec.sizes(), vec![300]);
        for r in &rec.rows {
            assert!((r.log_diff - (r.log_mod_anti - r.log_mod_diag)).abs() < 1e-15);
            assert!((r.estimate - 300.0 / (2.0 * r.u * r.u) * r.log_diff).abs() < 1e-9 * (1.0 + r.estimate.abs()));
        }
        assert!(run_oracle_start_experiment(&spec).is_err());
    }

    #[test]
    fn oracle_start_two_sizes() {
        let spec = small_spec(Mode::OracleStart);
        let rec = run_oracle_start_experiment(&spec).unwrap();
        assert_eq!(rec.rows.len(), 2 * 3 * 30);
        assert_eq!(rec.sizes(), vec![300, 600]);
        let s = rec.summary(600, 1.0);
        assert_eq!(s.seeds, 3);
        for sel in rec.selections_for(300) {
            assert!(sel.u >= sel.u_start);
        }
    }

    #[test]
    fn aggregates_by_column() {
        let row = |seed, u, estimate| GridRow {
            n: 5,
            seed,
            u,
            phi_diag: Complex64::new(1.0, 0.0),
            phi_anti: Complex64::new(1.0, 0.0),
            log_mod_diag: 0.0,
            log_mod_anti: 0.0,
            log_diff: 0.0,
            estimate,
            degenerate: false,
            s_theo: 0.0,
            s_emp: 0.0,
            admissible: true,
        };
        let rows = vec![row(0, 1.0, 1.0), row(0, 2.0, 10.0), row(1, 1.0, 3.0), row(1, 2.0, 20.0)];
        let agg = aggregate_rows(&rows);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].median, 2.0);
        assert_eq!(agg[1].mean, 15.0);
        assert_eq!(agg[1].u, 2.0);
    }

    #[test]
    fn seeds_required() {
        let s = small_spec(Mode::Figure);
        assert!(ExperimentSpec::new(s.model, 10, 10, s.grid, vec![], Mode::Figure, s.selector).is_err());
    }
}
