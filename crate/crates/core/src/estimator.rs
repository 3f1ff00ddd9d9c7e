//! Spectral estimator of the off-diagonal covariance `C¹²` and its error bounds.
//!
//! `Ĉ¹²ₙ(U) = n/(2U²) (log|φ̂ₙ(ũ)| - log|φ̂ₙ(u)|)` with `u = (U, U)` and
//! `ũ = (U, -U)`. The stochastic part of its error is controlled by
//! `sₙ(U) = C U⁻² (n log n)^{1/2} w(U)⁻¹ / |φₙ(u)|` (model-based) or by the
//! same expression with the truncated inverse `1/|φ̃ₙ|` (data-driven), the
//! deterministic part by `d(U) = M 2^{r/2} / U^{2-r}`.

use rayon::prelude::*;

use crate::cf_kernel::{
    ecf_pair, theoretical_log_modulus, truncated_inverse, weight, CfValue, DiagonalFrequency, TruncatedInverse,
    TruncationParams, WeightParams,
};
use crate::error::{invalid, Result};
use crate::levy_sim::{IncrementSample, LevyModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovEstimate {
    pub u: f64,
    pub value: f64,
    pub phi_diag_mod: f64,
    pub phi_anti_mod: f64,
    /// Set when either ECF modulus is exactly zero.
    pub degenerate: bool,
}

/// Constants shared by the error bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// Generic constant `C` of the stochastic bound.
    pub big_c: f64,
    /// Class bound `M`.
    pub m: f64,
    /// Co-jump activity index `r`.
    pub r: f64,
    pub kappa: f64,
    pub delta: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            big_c: 1.0,
            m: 1.0,
            r: 1.5,
            kappa: 1.0,
            delta: 0.5,
        }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if self.big_c.is_nan() || self.big_c <= 0.0 {
            return Err(invalid("bigC", format!("{} must be positive", self.big_c)));
        }
        if self.m.is_nan() || self.m <= 0.0 {
            return Err(invalid("M", format!("{} must be positive", self.m)));
        }
        if !(self.r > 1.0 && self.r <= 2.0) {
            return Err(invalid("r", format!("{} not in (1, 2]", self.r)));
        }
        if self.kappa.is_nan() || self.kappa <= 0.0 {
            return Err(invalid("kappa", format!("{} must be positive", self.kappa)));
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(invalid("delta", format!("{} must be positive", self.delta)));
        }
        Ok(())
    }

    pub fn weight_params(&self) -> WeightParams {
        WeightParams { delta: self.delta }
    }

    pub fn truncation_params(&self) -> TruncationParams {
        TruncationParams { kappa: self.kappa }
    }
}

/// Data-driven stochastic bound at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalBound {
    pub value: f64,
    pub inv_diag: TruncatedInverse,
    pub inv_anti: TruncatedInverse,
}

impl EmpiricalBound {
    pub fn inverse(&self) -> f64 {
        self.inv_diag.value.max(self.inv_anti.value)
    }

    pub fn truncated(&self) -> bool {
        self.inv_diag.truncated || self.inv_anti.truncated
    }
}

/// Everything the selectors need at one grid frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub u: f64,
    pub phi_diag: CfValue,
    pub phi_anti: CfValue,
    pub estimate: CovEstimate,
    pub bound: EmpiricalBound,
}

/// Bound curves over a frequency grid. `s_theo` is only known in simulation mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurves {
    pub grid: Vec<f64>,
    pub s_theo: Option<Vec<f64>>,
    pub s_emp: Vec<f64>,
    /// Running maximum of `s_emp` from the envelope start; equal to `s_emp` before it.
    pub s_env: Vec<f64>,
    pub d: Vec<f64>,
}

/// Ĉ¹² from precomputed ECF values at frequency `u`.
pub fn cov_from_cf(n: usize, u: f64, phi_diag: &CfValue, phi_anti: &CfValue) -> CovEstimate {
    let diag_mod = phi_diag.modulus();
    let anti_mod = phi_anti.modulus();
    let log_or_zero = |m: f64| if m != 0.0 { m.ln() } else { 0.0 };
    let value = n as f64 / (2.0 * u * u) * (log_or_zero(anti_mod) - log_or_zero(diag_mod));
    CovEstimate {
        u,
        value,
        phi_diag_mod: diag_mod,
        phi_anti_mod: anti_mod,
        degenerate: diag_mod == 0.0 || anti_mod == 0.0,
    }
}

pub fn spectral_cov(sample: &IncrementSample, u: f64) -> Result<CovEstimate> {
    check_frequency(u)?;
    let (d, a) = ecf_pair(sample, u);
    Ok(cov_from_cf(sample.n(), u, &d, &a))
}

/// `C U⁻² (n log n)^{1/2} w(U)⁻¹`, the CF-free factor of both stochastic bounds.
pub fn stochastic_prefactor(n: usize, u: f64, p: &BoundParams) -> f64 {
    let n = n as f64;
    p.big_c * (n * n.ln()).sqrt() / (u * u * weight(u, &p.weight_params()))
}

/// Model-based stochastic bound `sₙ(U)`.
pub fn stochastic_bound_theo(model: &LevyModel, n: usize, u: f64, p: &BoundParams) -> f64 {
    let log_mod = theoretical_log_modulus(model, n, &DiagonalFrequency::diag(u));
    stochastic_prefactor(n, u, p) * (-log_mod).exp()
}

/// Data-driven stochastic bound `s̃ₙ(U)` from the ECF on both orientations.
///
/// Uses the larger of the two truncated inverses.
pub fn stochastic_bound_emp(
    phi_diag: &CfValue,
    phi_anti: &CfValue,
    n: usize,
    u: f64,
    p: &BoundParams,
) -> EmpiricalBound {
    let (tp, wp) = (p.truncation_params(), p.weight_params());
    let inv_diag = truncated_inverse(phi_diag, n, u, &tp, &wp);
    let inv_anti = truncated_inverse(phi_anti, n, u, &tp, &wp);
    let inverse = inv_diag.value.max(inv_anti.value);
    EmpiricalBound {
        value: stochastic_prefactor(n, u, p) * inverse,
        inv_diag,
        inv_anti,
    }
}

pub fn stochastic_bound_emp_sample(sample: &IncrementSample, u: f64, p: &BoundParams) -> Result<EmpiricalBound> {
    check_frequency(u)?;
    let (d, a) = ecf_pair(sample, u);
    Ok(stochastic_bound_emp(&d, &a, sample.n(), u, p))
}

/// `d(U) = M 2^{r/2} / U^{2-r}`.
pub fn deterministic_bound(u: f64, p: &BoundParams) -> f64 {
    p.m * 2f64.powf(p.r / 2.0) / u.powf(2.0 - p.r)
}

/// Minimax rate `wₙ`: `n^{-1/2}` for `r <= 1`, `(n log n)^{(r-2)/2}` otherwise.
pub fn minimax_rate(n: usize, r: f64) -> f64 {
    let n = n as f64;
    if r <= 1.0 {
        n.powf(-0.5)
    } else {
        (n * n.ln()).powf((r - 2.0) / 2.0)
    }
}

/// Rate-optimal frequency `Uₙ`: `√n` for `r <= 1`, `√((r-1) n log n / M)` otherwise.
pub fn optimal_u(n: usize, r: f64, m: f64) -> f64 {
    let n = n as f64;
    if r <= 1.0 {
        n.sqrt()
    } else {
        ((r - 1.0) * n * n.ln() / m).sqrt()
    }
}

/// Running maximum of `curve` from `start` onward; entries before `start` are copied.
pub fn monotone_envelope(curve: &[f64], start: usize) -> Vec<f64> {
    let mut out = curve.to_vec();
    let mut running = f64::NEG_INFINITY;
    for v in out.iter_mut().skip(start) {
        running = running.max(*v);
        *v = running;
    }
    out
}

/// Realized stochastic and deterministic error terms at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTerms {
    /// `Hₙ(U)`; `+∞` when the estimate is degenerate.
    pub stochastic: f64,
    /// `D(U)`; `+∞` when the estimate is degenerate.
    pub deterministic: f64,
    pub degenerate: bool,
}

/// Split `Ĉ¹²ₙ(U) - C¹²` into `Hₙ(U) + D(U)` using the model's true CF.
pub fn error_decomposition_from_cf(
    model: &LevyModel,
    n: usize,
    u: f64,
    phi_diag: &CfValue,
    phi_anti: &CfValue,
) -> ErrorTerms {
    let (dm, am) = (phi_diag.modulus(), phi_anti.modulus());
    if dm == 0.0 || am == 0.0 {
        return ErrorTerms {
            stochastic: f64::INFINITY,
            deterministic: f64::INFINITY,
            degenerate: true,
        };
    }
    let factor = n as f64 / (2.0 * u * u);
    let theo_ratio = theoretical_log_modulus(model, n, &DiagonalFrequency::anti(u))
        - theoretical_log_modulus(model, n, &DiagonalFrequency::diag(u));
    let emp_ratio = am.ln() - dm.ln();
    ErrorTerms {
        stochastic: -factor * (theo_ratio - emp_ratio),
        deterministic: factor * theo_ratio - model.c12(),
        degenerate: false,
    }
}

pub fn error_decomposition(sample: &IncrementSample, model: &LevyModel, u: f64) -> Result<ErrorTerms> {
    check_frequency(u)?;
    let (d, a) = ecf_pair(sample, u);
    Ok(error_decomposition_from_cf(model, sample.n(), u, &d, &a))
}

/// ECF, estimate and empirical bound at every grid frequency.
pub fn evaluate_grid(sample: &IncrementSample, grid: &[f64], p: &BoundParams) -> Result<Vec<GridPoint>> {
    grid.iter().try_for_each(|&u| check_frequency(u))?;
    let n = sample.n();
    Ok(grid
        .par_iter()
        .map(|&u| {
            let (phi_diag, phi_anti) = ecf_pair(sample, u);
            GridPoint {
                u,
                phi_diag,
                phi_anti,
                estimate: cov_from_cf(n, u, &phi_diag, &phi_anti),
                bound: stochastic_bound_emp(&phi_diag, &phi_anti, n, u, p),
            }
        })
        .collect())
}

/// Assemble the bound curves for a grid evaluation, with the envelope started at `env_start`.
pub fn bound_curves(
    points: &[GridPoint],
    model: Option<&LevyModel>,
    n: usize,
    env_start: usize,
    p: &BoundParams,
) -> BoundCurves {
    let grid: Vec<f64> = points.iter().map(|g| g.u).collect();
    let s_emp: Vec<f64> = points.iter().map(|g| g.bound.value).collect();
    BoundCurves {
        s_theo: model.map(|m| grid.iter().map(|&u| stochastic_bound_theo(m, n, u, p)).collect()),
        s_env: monotone_envelope(&s_emp, env_start),
        d: grid.iter().map(|&u| deterministic_bound(u, p)).collect(),
        s_emp,
        grid,
    }
}

fn check_frequency(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(invalid("U", format!("frequency must be positive and finite, got {u}")))
    }
}
