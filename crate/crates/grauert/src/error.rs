//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by geometry, kernel, and verification routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("tube radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("scale parameter out of domain: {0}")]
    ScaleDomain(String),

    #[error("branch violation: coordinate separation {sep} is not inside (-pi, pi)")]
    BranchViolation { sep: f64 },

    #[error("degenerate flow direction: |y| = 0")]
    DegenerateDirection,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("point is not on the tube boundary: | |y| - tau | = {defect}")]
    NotOnBoundary { defect: f64 },

    #[error(
        "quadrature did not reach the requested accuracy: achieved {achieved}, wanted {wanted}"
    )]
    QuadratureAccuracy { achieved: f64, wanted: f64 },

    #[error("chart validity exceeded: |coords| = {size} > {radius}")]
    ChartValidity { size: f64, radius: f64 },

    #[error("root not bracketed while solving {0}")]
    RootBracket(String),

    #[error(
        "tail tolerance {wanted} is not certifiable; smallest certifiable bound is {smallest}"
    )]
    UncertifiableTail { wanted: f64, smallest: f64 },

    #[error("kernel diagonal {value} below the numerical floor; normalization is degenerate")]
    DegenerateNormalization { value: f64 },

    #[error("unsupported phase: {0}")]
    UnsupportedPhase(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("unsupported dimension m = {0} for this operation")]
    UnsupportedDimension(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
