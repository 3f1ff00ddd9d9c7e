//! Data-driven choice of the spectral frequency `U`.
//!
//! The pipeline finds an oracle start (first grid point where `|φ̂ₙ(u)|`
//! drops to `c`), restricts the grid to start there, builds a monotone
//! envelope of the empirical stochastic bound and then picks the largest
//! frequency whose estimate agrees with every earlier one up to the bound
//! (balancing principle). Both Lepskiĭ stopping rules are available on the
//! same inputs.

use crate::cf_kernel::{jump_bound_k, theoretical_cf_modulus, weight, DiagonalFrequency, WeightParams};
use crate::error::{invalid, Error, Result};
use crate::estimator::{bound_curves, evaluate_grid, BoundCurves, BoundParams, CovEstimate, GridPoint};
use crate::levy_sim::{IncrementSample, LevyModel};

/// Multiplier of the stochastic bound in the balancing comparisons.
pub const BALANCING_MULTIPLIER: f64 = 8.0;
/// Multiplier of the rate in the rate-based Lepskiĭ comparisons.
pub const RATE_MULTIPLIER: f64 = 2.0;

/// Strictly increasing positive frequencies `U₀ < … < U_K` with `K >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::GridTooSmall {
                needed: 2,
                got: points.len(),
            });
        }
        if points[0].is_nan()
            || points[0] <= 0.0
            || points.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0])
            || !points.iter().all(|u| u.is_finite())
        {
            return Err(Error::GridNotIncreasing);
        }
        Ok(Self { points })
    }

    /// `count` points spaced evenly in `log U` over `[min, max]`.
    pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::check_range(min, max, count)?;
        let (lo, hi) = (min.ln(), max.ln());
        let step = (hi - lo) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| (lo + step * i as f64).exp()).collect();
        points[0] = min;
        points[count - 1] = max;
        Self::new(points)
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::check_range(min, max, count)?;
        let step = (max - min) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| min + step * i as f64).collect();
        points[count - 1] = max;
        Self::new(points)
    }

    fn check_range(min: f64, max: f64, count: usize) -> Result<()> {
        if count < 2 {
            return Err(Error::GridTooSmall { needed: 2, got: count });
        }
        if !(min > 0.0 && max > min && max.is_finite()) {
            return Err(invalid("grid", format!("need 0 < min < max, got [{min}, {max}]")));
        }
        Ok(())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index `K` of the last point.
    pub fn last_index(&self) -> usize {
        self.points.len() - 1
    }

    pub fn nearest_index(&self, u: f64) -> usize {
        self.points
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - u).abs().total_cmp(&(b.1 - u).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Largest gap between neighbouring points inside `[lo, hi]`, widened by one point on each side.
    pub fn local_step(&self, lo: f64, hi: f64) -> f64 {
        let first = self.points.partition_point(|&u| u < lo).saturating_sub(1);
        let last = (self.points.partition_point(|&u| u <= hi) + 1).min(self.len());
        self.points[first..last]
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMethod {
    /// Pairwise stopping rule against the stochastic bound.
    Lepskii1,
    /// Forward stopping rule against a rate curve.
    Lepskii2,
    Balancing,
}

impl SelectionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMethod::Lepskii1 => "lepskii1",
            SelectionMethod::Lepskii2 => "lepskii2",
            SelectionMethod::Balancing => "balancing",
        }
    }
}

impl std::str::FromStr for SelectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lepskii1" => Ok(Self::Lepskii1),
            "lepskii2" => Ok(Self::Lepskii2),
            "balancing" => Ok(Self::Balancing),
            other => Err(invalid("method", format!("unknown selection method `{other}`"))),
        }
    }
}

/// One pairwise test performed by a selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub j: usize,
    pub k: usize,
    pub distance: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub method: SelectionMethod,
    pub index: usize,
    pub u: f64,
    pub estimate: f64,
    pub trace: Vec<Comparison>,
}

impl SelectionResult {
    fn new(method: SelectionMethod, estimates: &[CovEstimate], index: usize, trace: Vec<Comparison>) -> Self {
        Self {
            method,
            index,
            u: estimates[index].u,
            estimate: estimates[index].value,
            trace,
        }
    }

    fn shifted(mut self, offset: usize) -> Self {
        self.index += offset;
        for c in &mut self.trace {
            c.j += offset;
            c.k += offset;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleStart {
    pub u_start: f64,
    pub index: usize,
    pub c: f64,
    /// No grid point had `|φ̂ₙ| <= c`; the start was pinned to the last point.
    pub saturated: bool,
    /// Model-based bracket, when a model is known.
    pub interval: Option<(f64, f64)>,
}

/// Tuning of the adaptive pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancingConfig {
    pub bounds: BoundParams,
    /// Constant `A` of the rate-based rule.
    pub a: f64,
    /// Oracle-start level `c` in `(0, 1]`.
    pub c: f64,
    /// End the admissible range before the first frequency where either ECF is truncated.
    pub cap_at_truncation: bool,
}

impl Default for BalancingConfig {
    fn default() -> Self {
        Self {
            bounds: BoundParams::default(),
            a: 1.0,
            c: 0.5,
            cap_at_truncation: true,
        }
    }
}

impl BalancingConfig {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if self.a.is_nan() || self.a <= 0.0 {
            return Err(invalid("A", format!("{} must be positive", self.a)));
        }
        check_level(self.c)
    }
}

fn check_level(c: f64) -> Result<()> {
    if c > 0.0 && c <= 1.0 {
        Ok(())
    } else {
        Err(invalid("c", format!("{c} not in (0, 1]")))
    }
}

fn check_nondecreasing(curve: &[f64]) -> Result<()> {
    match curve.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => Err(Error::BoundNotMonotone { index: i + 1 }),
        None => Ok(()),
    }
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

/// First index whose modulus is at most `c`, or the last index (saturated).
pub fn oracle_start_from_moduli(grid: &FrequencyGrid, moduli: &[f64], c: f64) -> Result<OracleStart> {
    check_level(c)?;
    check_lengths(grid.len(), moduli.len())?;
    let (index, saturated) = match moduli.iter().position(|&m| m <= c) {
        Some(i) => (i, false),
        None => (grid.last_index(), true),
    };
    Ok(OracleStart {
        u_start: grid.points()[index],
        index,
        c,
        saturated,
        interval: None,
    })
}

/// Smallest grid frequency with `|φ̂ₙ(U, U)| <= c`.
pub fn oracle_start_empirical(sample: &IncrementSample, grid: &FrequencyGrid, c: f64) -> Result<OracleStart> {
    let moduli: Vec<f64> = grid
        .points()
        .iter()
        .map(|&u| crate::cf_kernel::ecf(sample, &DiagonalFrequency::diag(u)).modulus())
        .collect();
    oracle_start_from_moduli(grid, &moduli, c)
}

/// Smallest grid frequency with `|φₙ(U, U)| <= 1/2` under `model`.
pub fn oracle_start_theoretical(model: &LevyModel, n: usize, grid: &FrequencyGrid) -> Result<OracleStart> {
    let moduli: Vec<f64> = grid
        .points()
        .iter()
        .map(|&u| theoretical_cf_modulus(model, n, &DiagonalFrequency::diag(u)))
        .collect();
    let mut start = oracle_start_from_moduli(grid, &moduli, 0.5)?;
    start.interval = Some(oracle_start_interval(model, n, grid)?);
    Ok(start)
}

/// Bracket `[√(2 log 2/(C_sum + K)) √n, √(2 log 2/C_sum) √n]` for the oracle start.
pub fn oracle_start_interval(model: &LevyModel, n: usize, grid: &FrequencyGrid) -> Result<(f64, f64)> {
    let c_sum = model.c_sum();
    if c_sum.is_nan() || c_sum <= 0.0 {
        return Err(Error::NoDiffusion { c_sum });
    }
    let k = jump_bound_k(model, grid.points());
    let scale = (2.0 * std::f64::consts::LN_2 * n as f64).sqrt();
    Ok((scale / (c_sum + k).sqrt(), scale / c_sum.sqrt()))
}

/// First Lepskiĭ rule: accept `j + 1` while `|Ĉ_{j+1} - Ĉ_k| <= C sₙ(U_{j+1})` for all `k <= j`.
///
/// Stops at the first violation or before a degenerate candidate;
/// degenerate estimates are skipped as comparison partners.
pub fn lepskii_stop_rule(estimates: &[CovEstimate], bounds: &[f64], big_c: f64) -> Result<SelectionResult> {
    if estimates.len() < 2 {
        return Err(Error::GridTooSmall {
            needed: 2,
            got: estimates.len(),
        });
    }
    check_lengths(estimates.len(), bounds.len())?;
    check_nondecreasing(bounds)?;

    let mut trace = Vec::new();
    let mut selected = 0;
    'scan: for j in 0..estimates.len() - 1 {
        let candidate = &estimates[j + 1];
        if candidate.degenerate {
            break;
        }
        let threshold = big_c * bounds[j + 1];
        for (k, other) in estimates[..=j].iter().enumerate() {
            if other.degenerate {
                continue;
            }
            let distance = (candidate.value - other.value).abs();
            let passed = distance <= threshold;
            trace.push(Comparison {
                j: j + 1,
                k,
                distance,
                threshold,
                passed,
            });
            if !passed {
                break 'scan;
            }
        }
        selected = j + 1;
    }
    Ok(SelectionResult::new(
        SelectionMethod::Lepskii1,
        estimates,
        selected,
        trace,
    ))
}

/// Second Lepskiĭ rule: smallest `j` with `|Ĉ_j - Ĉ_k| <= 2A wₙ(k)` for every `k > j`, else `K`.
pub fn lepskii_stop_rule_rates(estimates: &[CovEstimate], rates: &[f64], a: f64) -> Result<SelectionResult> {
    if estimates.len() < 2 {
        return Err(Error::GridTooSmall {
            needed: 2,
            got: estimates.len(),
        });
    }
    check_lengths(estimates.len(), rates.len())?;
    check_nondecreasing(rates)?;

    let last = estimates.len() - 1;
    let mut trace = Vec::new();
    for j in 0..last {
        if estimates[j].degenerate {
            continue;
        }
        let mut all_passed = true;
        for k in j + 1..=last {
            if estimates[k].degenerate {
                continue;
            }
            let distance = (estimates[j].value - estimates[k].value).abs();
            let threshold = RATE_MULTIPLIER * a * rates[k];
            let passed = distance <= threshold;
            trace.push(Comparison {
                j,
                k,
                distance,
                threshold,
                passed,
            });
            if !passed {
                all_passed = false;
                break;
            }
        }
        if all_passed {
            return Ok(SelectionResult::new(SelectionMethod::Lepskii2, estimates, j, trace));
        }
    }
    Ok(SelectionResult::new(SelectionMethod::Lepskii2, estimates, last, trace))
}

/// `8 C γ(n) / θ(U) · w(U)⁻¹ / |φ̃ₙ(U)|` with `γ(n) = (n log n)^{1/2}`, `θ(U) = U²`.
pub fn balancing_threshold(n: usize, u: f64, inverse: f64, big_c: f64, wp: &WeightParams) -> f64 {
    let n = n as f64;
    BALANCING_MULTIPLIER * big_c * (n * n.ln()).sqrt() / (u * u) / weight(u, wp) * inverse
}

/// Largest index `i` such that `|Ĉ_j - Ĉ_i| <= thresholds[j]` for every `j < i`.
///
/// Candidates end before the first degenerate estimate; degenerate
/// comparison partners are skipped. Falls back to index 0.
pub fn balancing_select(estimates: &[CovEstimate], thresholds: &[f64]) -> Result<SelectionResult> {
    if estimates.is_empty() {
        return Err(Error::GridTooSmall { needed: 1, got: 0 });
    }
    check_lengths(estimates.len(), thresholds.len())?;

    let limit = estimates
        .iter()
        .skip(1)
        .position(|e| e.degenerate)
        .unwrap_or(estimates.len() - 1);
    let mut trace = Vec::new();
    for i in (1..=limit).rev() {
        let candidate = estimates[i].value;
        let mut ok = true;
        for j in 0..i {
            if estimates[j].degenerate {
                continue;
            }
            let distance = (estimates[j].value - candidate).abs();
            let passed = distance <= thresholds[j];
            trace.push(Comparison {
                j,
                k: i,
                distance,
                threshold: thresholds[j],
                passed,
            });
            if !passed {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(SelectionResult::new(SelectionMethod::Balancing, estimates, i, trace));
        }
    }
    Ok(SelectionResult::new(SelectionMethod::Balancing, estimates, 0, trace))
}

/// `U_bal = (4C / (κ 2^{r/2} M))^{1/r} n^{1/r}`.
pub fn u_bal_theoretical(n: usize, r: f64, m: f64, big_c: f64, kappa: f64) -> f64 {
    (4.0 * big_c / (kappa * 2f64.powf(r / 2.0) * m)).powf(1.0 / r) * (n as f64).powf(1.0 / r)
}

/// `a(n) = exp(-2n(c+1)²)`, reported alongside selections.
pub fn probability_floor(n: usize, c: f64) -> f64 {
    (-2.0 * n as f64 * (c + 1.0).powi(2)).exp()
}

/// Output of [`adaptive_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveOutcome {
    /// Selection with indices into the full grid.
    pub selection: SelectionResult,
    pub oracle: OracleStart,
    /// Admissible index range `[start, end]` the selector ran on.
    pub start: usize,
    pub end: usize,
    pub points: Vec<GridPoint>,
    pub curves: BoundCurves,
    pub probability_floor: f64,
}

impl AdaptiveOutcome {
    pub fn estimates(&self) -> Vec<CovEstimate> {
        self.points.iter().map(|p| p.estimate).collect()
    }

    /// Grid index in the admissible range nearest to `u`.
    pub fn admissible_index(&self, u: f64) -> usize {
        (self.start..=self.end)
            .min_by(|&a, &b| {
                (self.curves.grid[a] - u)
                    .abs()
                    .total_cmp(&(self.curves.grid[b] - u).abs())
            })
            .unwrap_or(self.start)
    }

    /// `5 s̃ₙ(U_bal)` with `U_bal` snapped to the admissible range.
    pub fn balancing_error_bound(&self, u_bal: f64) -> f64 {
        5.0 * self.curves.s_emp[self.admissible_index(u_bal)]
    }
}

/// Fully data-driven selection with the balancing principle.
pub fn adaptive_estimate(
    sample: &IncrementSample,
    grid: &FrequencyGrid,
    config: &BalancingConfig,
) -> Result<AdaptiveOutcome> {
    adaptive_estimate_with(sample, grid, config, SelectionMethod::Balancing)
}

/// Oracle start, admissible range, envelope and then the chosen selector.
///
/// Lepskiĭ 1 compares against the envelope `s̃ₙ*` (which already carries
/// `C`), Lepskiĭ 2 uses the envelope as its rate curve.
pub fn adaptive_estimate_with(
    sample: &IncrementSample,
    grid: &FrequencyGrid,
    config: &BalancingConfig,
    method: SelectionMethod,
) -> Result<AdaptiveOutcome> {
    config.validate()?;
    let n = sample.n();
    let points = evaluate_grid(sample, grid.points(), &config.bounds)?;
    let moduli: Vec<f64> = points.iter().map(|p| p.phi_diag.modulus()).collect();
    let oracle = oracle_start_from_moduli(grid, &moduli, config.c)?;
    let start = oracle.index;
    let end = if config.cap_at_truncation {
        let usable = |p: &GridPoint| !p.bound.truncated() && !p.estimate.degenerate;
        let run = points[start..].iter().take_while(|p| usable(p)).count();
        start + run.saturating_sub(1)
    } else {
        grid.last_index()
    };

    let (selection, curves) = select_in_range(&points, n, start, end, config, method)?;

    Ok(AdaptiveOutcome {
        selection,
        oracle,
        start,
        end,
        points,
        curves,
        probability_floor: probability_floor(n, config.c),
    })
}

/// Envelope and selector on the admissible index range `[start, end]` of `points`.
///
/// Returns the selection with full-grid indices and the bound curves, whose
/// envelope starts at `start`.
pub fn select_in_range(
    points: &[GridPoint],
    n: usize,
    start: usize,
    end: usize,
    config: &BalancingConfig,
    method: SelectionMethod,
) -> Result<(SelectionResult, BoundCurves)> {
    if points.is_empty() {
        return Err(Error::GridTooSmall { needed: 1, got: 0 });
    }
    if start > end || end >= points.len() {
        return Err(Error::EmptyRestrictedGrid {
            u_start: points.get(start).map_or(f64::INFINITY, |p| p.u),
            u_end: points[end.min(points.len() - 1)].u,
        });
    }
    let curves = bound_curves(points, None, n, start, &config.bounds);
    let estimates: Vec<CovEstimate> = points[start..=end].iter().map(|p| p.estimate).collect();
    let envelope = &curves.s_env[start..=end];

    let selection = match method {
        SelectionMethod::Balancing => {
            let thresholds: Vec<f64> = envelope.iter().map(|s| BALANCING_MULTIPLIER * s).collect();
            balancing_select(&estimates, &thresholds)?
        }
        SelectionMethod::Lepskii1 | SelectionMethod::Lepskii2 if estimates.len() < 2 => {
            SelectionResult::new(method, &estimates, 0, Vec::new())
        }
        SelectionMethod::Lepskii1 => lepskii_stop_rule(&estimates, envelope, 1.0)?,
        SelectionMethod::Lepskii2 => lepskii_stop_rule_rates(&estimates, envelope, config.a)?,
    }
    .shifted(start);
    Ok((selection, curves))
}
