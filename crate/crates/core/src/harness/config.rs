//! TOML experiment configuration.
//!
//! Every key is optional. Missing model keys fall back to the reference
//! model, missing tuning keys to the library defaults:
//!
//! ```toml
//! n = 1000
//! seed = 0
//! seeds = 20
//! cov = [[2.0, 1.0], [1.0, 1.0]]
//! drift = [0.0, 0.0]
//! grid_min = 0.1
//! grid_max = 50.0
//! grid_points = 500
//! grid_log = true
//!
//! [[jumps]]
//! alpha = 0.2
//! scale = 0.3
//! axis = 1
//! ```

use std::path::Path;

use serde::Deserialize;

use super::experiment::{ExperimentSpec, Mode};
use super::{reference_model, REFERENCE_COV};
use crate::adapt::{BalancingConfig, FrequencyGrid};
use crate::error::{invalid, Error, Result};
use crate::estimator::BoundParams;
use crate::levy_sim::{LevyModel, Matrix2, StableComponent};

pub const DEFAULT_N: usize = 1000;
pub const DEFAULT_SEEDS: usize = 20;
pub const DEFAULT_GRID_MIN: f64 = 0.1;
pub const DEFAULT_GRID_MAX: f64 = 50.0;
pub const DEFAULT_GRID_POINTS: usize = 500;

/// Flat experiment configuration; command-line flags use the same names.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub cov: Option<Matrix2>,
    pub drift: Option<[f64; 2]>,
    pub jumps: Option<Vec<StableComponent>>,
    pub n: Option<usize>,
    /// First seed; seeds run from here.
    pub seed: Option<u64>,
    /// Number of consecutive seeds.
    pub seeds: Option<usize>,
    /// Second sample size of oracle-start runs (default `5n`).
    pub compare_n: Option<usize>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub grid_log: Option<bool>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub kappa: Option<f64>,
    pub big_c: Option<f64>,
    pub a: Option<f64>,
    pub r: Option<f64>,
    pub m: Option<f64>,
    pub cap_at_truncation: Option<bool>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident, $($field:ident),*) => {
        ConfigFile { $($field: $top.$field.or($base.$field)),* }
    };
}

impl ConfigFile {
    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|source| Error::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Keys set in `top` win over keys set in `self`.
    pub fn overlay(self, top: ConfigFile) -> ConfigFile {
        let base = self;
        overlay_fields!(
            base,
            top,
            cov,
            drift,
            jumps,
            n,
            seed,
            seeds,
            compare_n,
            grid_min,
            grid_max,
            grid_points,
            grid_log,
            c,
            delta,
            kappa,
            big_c,
            a,
            r,
            m,
            cap_at_truncation
        )
    }

    /// Model from the config; without `cov` and `jumps` this is the reference model.
    pub fn model(&self) -> Result<LevyModel> {
        let reference = reference_model(0.2, 0.1)?;
        LevyModel::new(
            self.cov.unwrap_or(REFERENCE_COV),
            self.drift.unwrap_or([0.0, 0.0]),
            self.jumps.clone().unwrap_or(reference.jumps),
        )
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(DEFAULT_N)
    }

    pub fn seed_list(&self) -> Result<Vec<u64>> {
        let count = self.seeds.unwrap_or(DEFAULT_SEEDS);
        if count == 0 {
            return Err(invalid("seeds", "need at least one seed"));
        }
        let first = self.seed.unwrap_or(0);
        Ok((0..count as u64).map(|i| first.wrapping_add(i)).collect())
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        let min = self.grid_min.unwrap_or(DEFAULT_GRID_MIN);
        let max = self.grid_max.unwrap_or(DEFAULT_GRID_MAX);
        let points = self.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
        if self.grid_log.unwrap_or(true) {
            FrequencyGrid::log_spaced(min, max, points)
        } else {
            FrequencyGrid::linear(min, max, points)
        }
    }

    /// Selector tuning; `M` defaults to the model's `‖C‖_∞` (or 1 when that is 0).
    pub fn selector(&self, model: &LevyModel) -> Result<BalancingConfig> {
        let defaults = BalancingConfig::default();
        let class_bound = model.class_bound();
        let config = BalancingConfig {
            bounds: BoundParams {
                big_c: self.big_c.unwrap_or(defaults.bounds.big_c),
                m: self.m.unwrap_or(if class_bound > 0.0 { class_bound } else { 1.0 }),
                r: self.r.unwrap_or(defaults.bounds.r),
                kappa: self.kappa.unwrap_or(defaults.bounds.kappa),
                delta: self.delta.unwrap_or(defaults.bounds.delta),
            },
            a: self.a.unwrap_or(defaults.a),
            c: self.c.unwrap_or(defaults.c),
            cap_at_truncation: self.cap_at_truncation.unwrap_or(defaults.cap_at_truncation),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn spec(&self, mode: Mode) -> Result<ExperimentSpec> {
        let model = self.model()?;
        let n = self.n();
        let selector = self.selector(&model)?;
        ExperimentSpec::new(
            model,
            n,
            self.compare_n.unwrap_or(5 * n),
            self.grid()?,
            self.seed_list()?,
            mode,
            selector,
        )
    }
}
