//! Characteristic functions on the diagonal `(U, U)` and anti-diagonal `(U, -U)`.
//!
//! Covers the empirical characteristic function of a sample, the closed-form
//! characteristic function of a [`LevyModel`], the logarithmic weight `w(U)`
//! and the truncated inverse `1/|φ̃ₙ|` which clips `1/|φ̂ₙ|` at the noise
//! floor `κₙ n^{-1/2}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::levy_sim::{IncrementSample, LevyModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// `u = (U, U)`
    Diag,
    /// `ũ = (U, -U)`
    AntiDiag,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Diag => "diag",
            Orientation::AntiDiag => "antidiag",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalFrequency {
    pub u: f64,
    pub orientation: Orientation,
}

impl DiagonalFrequency {
    pub fn diag(u: f64) -> Self {
        Self {
            u,
            orientation: Orientation::Diag,
        }
    }

    pub fn anti(u: f64) -> Self {
        Self {
            u,
            orientation: Orientation::AntiDiag,
        }
    }

    pub fn vector(&self) -> [f64; 2] {
        match self.orientation {
            Orientation::Diag => [self.u, self.u],
            Orientation::AntiDiag => [self.u, -self.u],
        }
    }
}

/// Exponent parameter of the weight `w(U) = log(e + |U|)^(-1/2 - delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub delta: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self { delta: 0.5 }
    }
}

/// Truncation constant `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub kappa: f64,
}

impl Default for TruncationParams {
    fn default() -> Self {
        Self { kappa: 1.0 }
    }
}

/// A characteristic function value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfValue {
    pub value: Complex64,
}

impl CfValue {
    pub fn new(value: Complex64) -> Self {
        Self { value }
    }

    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// `1/|φ̃ₙ|` together with whether the threshold branch was taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedInverse {
    pub value: f64,
    pub truncated: bool,
}

pub fn weight(u: f64, params: &WeightParams) -> f64 {
    (std::f64::consts::E + u.abs()).ln().powf(-0.5 - params.delta)
}

/// Empirical characteristic function `(1/n) Σ exp(i <u, ΔX_j>)`.
pub fn ecf(sample: &IncrementSample, freq: &DiagonalFrequency) -> CfValue {
    let [u1, u2] = freq.vector();
    let (re, im) = sample.increments().iter().fold((0.0, 0.0), |(re, im), x| {
        let (s, c) = (u1 * x[0] + u2 * x[1]).sin_cos();
        (re + c, im + s)
    });
    let n = sample.n() as f64;
    CfValue::new(Complex64::new(re / n, im / n))
}

/// Diagonal and anti-diagonal ECF at `U` in a single pass over the sample.
pub fn ecf_pair(sample: &IncrementSample, u: f64) -> (CfValue, CfValue) {
    let mut acc = [0.0f64; 4];
    for x in sample.increments() {
        let (sd, cd) = (u * (x[0] + x[1])).sin_cos();
        let (sa, ca) = (u * (x[0] - x[1])).sin_cos();
        acc[0] += cd;
        acc[1] += sd;
        acc[2] += ca;
        acc[3] += sa;
    }
    let n = sample.n() as f64;
    (
        CfValue::new(Complex64::new(acc[0] / n, acc[1] / n)),
        CfValue::new(Complex64::new(acc[2] / n, acc[3] / n)),
    )
}

/// `κₙ = (κ/2) (log n)^{1/2} w(U)^{-1}`.
pub fn kappa_n(n: usize, u: f64, tp: &TruncationParams, wp: &WeightParams) -> f64 {
    0.5 * tp.kappa * (n as f64).ln().sqrt() / weight(u, wp)
}

/// Truncation level `κₙ n^{-1/2}` below which `|φ̂ₙ|` is treated as noise.
pub fn truncation_threshold(n: usize, u: f64, tp: &TruncationParams, wp: &WeightParams) -> f64 {
    kappa_n(n, u, tp, wp) / (n as f64).sqrt()
}

pub fn truncated_inverse(
    phi_hat: &CfValue,
    n: usize,
    u: f64,
    tp: &TruncationParams,
    wp: &WeightParams,
) -> TruncatedInverse {
    let threshold = truncation_threshold(n, u, tp, wp);
    let modulus = phi_hat.modulus();
    if modulus >= threshold {
        TruncatedInverse {
            value: 1.0 / modulus,
            truncated: false,
        }
    } else {
        TruncatedInverse {
            value: 1.0 / threshold,
            truncated: true,
        }
    }
}

/// Jump part of the characteristic exponent, `h(u) = 2 Σ scale^alpha U^alpha`.
///
/// Identical on both orientations since every component loads on one axis.
pub fn jump_exponent(model: &LevyModel, u: f64) -> f64 {
    let u = u.abs();
    2.0 * model.jumps.iter().map(|j| j.intensity() * u.powf(j.alpha)).sum::<f64>()
}

/// `log |φₙ(u)| = -(<C u, u> + h(u)) / (2n)`.
pub fn theoretical_log_modulus(model: &LevyModel, n: usize, freq: &DiagonalFrequency) -> f64 {
    let quad = match freq.orientation {
        Orientation::Diag => model.c_sum(),
        Orientation::AntiDiag => model.c_anti_sum(),
    } * freq.u
        * freq.u;
    -(quad + jump_exponent(model, freq.u)) / (2.0 * n as f64)
}

pub fn theoretical_cf_modulus(model: &LevyModel, n: usize, freq: &DiagonalFrequency) -> f64 {
    theoretical_log_modulus(model, n, freq).exp()
}

/// One-step characteristic function of `model`, including the drift phase.
pub fn theoretical_cf(model: &LevyModel, n: usize, freq: &DiagonalFrequency) -> CfValue {
    let [u1, u2] = freq.vector();
    let phase = (u1 * model.drift[0] + u2 * model.drift[1]) / n as f64;
    CfValue::new(Complex64::from_polar(theoretical_cf_modulus(model, n, freq), phase))
}

/// Constant `K` with `h(U) <= K U^2` on `[min(grid), max(grid)]`.
///
/// Gaussian-index components contribute exactly `2 scale^2`. Lighter-tailed
/// ones have `h(U)/U^2` decreasing in `U`, so their supremum sits at the
/// smallest grid point and gets 10% headroom.
pub fn jump_bound_k(model: &LevyModel, grid: &[f64]) -> f64 {
    model
        .jumps
        .iter()
        .map(|j| {
            if j.alpha == 2.0 {
                2.0 * j.scale * j.scale
            } else {
                let sup = grid
                    .iter()
                    .filter(|u| **u > 0.0)
                    .map(|u| 2.0 * j.intensity() * u.powf(j.alpha - 2.0))
                    .fold(0.0, f64::max);
                1.1 * sup
            }
        })
        .sum()
}
