//! Simulation of bivariate Lévy increments `X = B + J`.
//!
//! The Gaussian part `B` has covariance `C` (per unit time) and drift `b`;
//! the jump part `J` is a sum of independent symmetric stable processes,
//! each loading on a single coordinate. With this parameterization the
//! one-step characteristic function of a component with index `alpha` and
//! scale `s` at frequency `v` is `exp(-s^alpha |v|^alpha dt)`.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Row-major 2×2 matrix.
pub type Matrix2 = [[f64; 2]; 2];

const PSD_TOL: f64 = 1e-12;

/// Coordinate a stable component loads on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Axis {
    First,
    Second,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::First => 0,
            Axis::Second => 1,
        }
    }
}

impl TryFrom<u8> for Axis {
    type Error = String;

    fn try_from(value: u8) -> std::result::Result<Self, Self::Error> {
        match value {
            1 => Ok(Axis::First),
            2 => Ok(Axis::Second),
            other => Err(format!("axis must be 1 or 2, got {other}")),
        }
    }
}

impl From<Axis> for u8 {
    fn from(axis: Axis) -> u8 {
        axis.index() as u8 + 1
    }
}

/// Symmetric alpha-stable jump component on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableComponent {
    pub alpha: f64,
    pub scale: f64,
    pub axis: Axis,
}

impl StableComponent {
    pub fn new(alpha: f64, scale: f64, axis: Axis) -> Result<Self> {
        let component = Self { alpha, scale, axis };
        component.validate()?;
        Ok(component)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(invalid("alpha", format!("{} not in (0, 2]", self.alpha)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(invalid("scale", format!("{} must be positive", self.scale)));
        }
        Ok(())
    }

    /// `scale^alpha`, the coefficient of `|v|^alpha` in the characteristic exponent.
    pub fn intensity(&self) -> f64 {
        self.scale.powf(self.alpha)
    }
}

/// Drift, Brownian covariance and stable jump components of a bivariate Lévy process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyModel {
    pub cov: Matrix2,
    pub drift: [f64; 2],
    #[serde(default)]
    pub jumps: Vec<StableComponent>,
}

impl LevyModel {
    pub fn new(cov: Matrix2, drift: [f64; 2], jumps: Vec<StableComponent>) -> Result<Self> {
        let model = Self { cov, drift, jumps };
        model.validate()?;
        Ok(model)
    }

    /// Jump-free model with zero drift.
    pub fn gaussian(cov: Matrix2) -> Result<Self> {
        Self::new(cov, [0.0, 0.0], Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        if self.jumps.len() > 2 {
            return Err(invalid(
                "jumps",
                format!("at most two components, got {}", self.jumps.len()),
            ));
        }
        for jump in &self.jumps {
            jump.validate()?;
        }
        if !self.drift.iter().all(|b| b.is_finite()) {
            return Err(invalid("drift", "entries must be finite"));
        }
        cholesky2(&self.cov).map(|_| ())
    }

    pub fn c12(&self) -> f64 {
        self.cov[0][1]
    }

    /// Sum of all covariance entries, `<C u, u> / U^2` on the diagonal.
    pub fn c_sum(&self) -> f64 {
        self.cov.iter().flatten().sum()
    }

    /// `<C ũ, ũ> / U^2` on the anti-diagonal.
    pub fn c_anti_sum(&self) -> f64 {
        self.cov[0][0] + self.cov[1][1] - self.cov[0][1] - self.cov[1][0]
    }

    /// Maximum absolute row sum `‖C‖_∞`. The axis-loaded jump components
    /// never jump together, so this is also the class bound `M`.
    pub fn class_bound(&self) -> f64 {
        self.cov
            .iter()
            .map(|row| row[0].abs() + row[1].abs())
            .fold(0.0, f64::max)
    }

    /// Largest stable index among the jump components, 0 when there are none.
    pub fn max_jump_index(&self) -> f64 {
        self.jumps.iter().map(|j| j.alpha).fold(0.0, f64::max)
    }
}

/// Sampling configuration. The horizon is always `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n: usize,
    pub seed: u64,
}

impl SimulationConfig {
    pub const HORIZON: f64 = 1.0;

    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", format!("need at least 2 increments, got {n}")));
        }
        Ok(Self { n, seed })
    }

    pub fn dt(&self) -> f64 {
        Self::HORIZON / self.n as f64
    }
}

/// `n` bivariate increments observed at mesh `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSample {
    increments: Vec<[f64; 2]>,
}

impl IncrementSample {
    pub fn new(increments: Vec<[f64; 2]>) -> Result<Self> {
        if increments.is_empty() {
            return Err(invalid("increments", "sample is empty"));
        }
        if let Some(pos) = increments.iter().position(|x| !(x[0].is_finite() && x[1].is_finite())) {
            return Err(invalid("increments", format!("non-finite entry at row {pos}")));
        }
        Ok(Self { increments })
    }

    pub fn increments(&self) -> &[[f64; 2]] {
        &self.increments
    }

    pub fn n(&self) -> usize {
        self.increments.len()
    }

    pub fn mesh(&self) -> f64 {
        1.0 / self.n() as f64
    }

    /// Same sample with the second coordinate negated.
    pub fn flip_second(&self) -> Self {
        Self {
            increments: self.increments.iter().map(|&[a, b]| [a, -b]).collect(),
        }
    }
}

/// Lower-triangular `L` with `L Lᵀ = cov`.
///
/// Accepts positive semi-definite input; a zero pivot leaves its column zero.
pub fn cholesky2(cov: &Matrix2) -> Result<Matrix2> {
    let [[a, b], [b2, c]] = *cov;
    if ![a, b, b2, c].iter().all(|x| x.is_finite()) {
        return Err(invalid("cov", "entries must be finite"));
    }
    let scale = 1.0f64.max(a.abs()).max(c.abs());
    if (b - b2).abs() > PSD_TOL * scale {
        return Err(Error::Asymmetric { c12: b, c21: b2 });
    }
    let half_trace = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let min_eig = half_trace - radius;
    if min_eig < -PSD_TOL * scale {
        return Err(Error::Indefinite { eigenvalue: min_eig });
    }

    let l11 = a.max(0.0).sqrt();
    let l21 = if l11 > 0.0 { b / l11 } else { 0.0 };
    let l22 = (c - l21 * l21).max(0.0).sqrt();
    Ok([[l11, 0.0], [l21, l22]])
}

/// Random stream for `(seed, stream)`; distinct streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One symmetric alpha-stable increment over a step `dt` (Chambers–Mallows–Stuck).
///
/// The result has characteristic function `exp(-scale^alpha |v|^alpha dt)`;
/// for `alpha = 2` it is Gaussian with variance `2 scale^2 dt`. Always
/// consumes exactly one uniform and one exponential draw.
pub fn sample_stable<R: Rng + ?Sized>(alpha: f64, scale: f64, dt: f64, rng: &mut R) -> f64 {
    assert!(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2]");
    assert!(scale >= 0.0 && dt > 0.0, "scale must be nonnegative and dt positive");

    let v = FRAC_PI_2 * (2.0 * rng.sample::<f64, _>(Open01) - 1.0);
    let w: f64 = rng.sample(Exp1);
    if scale == 0.0 {
        return 0.0;
    }
    let step_scale = scale * dt.powf(1.0 / alpha);

    if alpha == 2.0 {
        return step_scale * 2.0 * v.sin() * w.sqrt();
    }
    if alpha == 1.0 {
        return step_scale * v.tan();
    }

    // Log form: cos(v)^(1/alpha) underflows for small alpha.
    let numerator = (alpha * v).sin();
    if numerator == 0.0 {
        return 0.0;
    }
    let log_magnitude = numerator.abs().ln() - v.cos().ln() / alpha
        + (1.0 - alpha) / alpha * (((1.0 - alpha) * v).cos().ln() - w.ln())
        + step_scale.ln();
    numerator.signum() * log_magnitude.exp()
}

/// Simulate `config.n` increments of `model` on `[0, 1]`.
///
/// Each increment draws two standard normals and then one (uniform,
/// exponential) pair per jump component, all from the single stream of
/// `config.seed`, so identical inputs give bit-identical output.
pub fn simulate_increments(model: &LevyModel, config: &SimulationConfig) -> Result<IncrementSample> {
    model.validate()?;
    let l = cholesky2(&model.cov)?;
    let dt = config.dt();
    let sqrt_dt = dt.sqrt();
    let mut rng = stream_rng(config.seed, 0);

    let increments = (0..config.n)
        .map(|_| {
            let z1: f64 = rng.sample::<f64, _>(StandardNormal) * sqrt_dt;
            let z2: f64 = rng.sample::<f64, _>(StandardNormal) * sqrt_dt;
            let mut x = [
                model.drift[0] * dt + l[0][0] * z1,
                model.drift[1] * dt + (l[1][0] * z1 + l[1][1] * z2),
            ];
            for jump in &model.jumps {
                x[jump.axis.index()] += sample_stable(jump.alpha, jump.scale, dt, &mut rng);
            }
            x
        })
        .collect();
    IncrementSample::new(increments)
}
