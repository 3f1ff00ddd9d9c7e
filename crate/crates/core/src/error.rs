use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the estimation pipeline and its harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance matrix is not symmetric: C12 = {c12}, C21 = {c21}")]
    Asymmetric { c12: f64, c21: f64 },

    #[error("covariance matrix is not positive semi-definite (smallest eigenvalue {eigenvalue:e})")]
    Indefinite { eigenvalue: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency grid needs at least {needed} points, got {got}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("frequency grid must be strictly increasing and positive")]
    GridNotIncreasing,

    #[error("bound curve must be nondecreasing along the grid (violated at index {index})")]
    BoundNotMonotone { index: usize },

    #[error("input lengths disagree: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty restricted grid: oracle start {u_start} lies beyond the grid end {u_end}")]
    EmptyRestrictedGrid { u_start: f64, u_end: f64 },

    #[error("model has no Gaussian mass on the diagonal (C_sum = {c_sum})")]
    NoDiffusion { c_sum: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Config {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
