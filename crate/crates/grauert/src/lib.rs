//! Geometry and spectral kernels of Grauert tubes over flat model
//! manifolds (the circle and the flat m-torus), at desk scale.
//!
//! The crate provides:
//!
//! * the reduced Heisenberg group, its affine action on the Siegel domain,
//!   and the level-one model Szegő kernel ([`heisenberg`]);
//! * exact spectra, entire eigenfunctions, complexified distances, and the
//!   tube geometry of the flat models ([`models`]);
//! * the boundary defining function, its polarization, the Calabi
//!   diastasis, and degree-2 holomorphic normal forms at boundary points
//!   ([`geometry`]);
//! * the smoothing function χ with certified decay data ([`smoothing`]),
//!   and the smoothed spectral projection and Toeplitz localization
//!   kernels evaluated as certified windowed mode sums ([`kernels`]);
//! * the reduced stationary-phase package: critical point, Hessian and
//!   inverse, the ⟨(Ψ'')⁻¹D, D⟩ operator, the model Gaussian integral, and
//!   a numeric oscillatory-integral oracle ([`phase`]);
//! * end-to-end scaling studies comparing diagonal-normalized kernels
//!   against the leading Heisenberg model factor, with convergence-rate
//!   fits ([`scaling`]).
//!
//! All numeric code is generic over the floating scalar through
//! [`scalar::Scalar`]; the `f64` aliases below are the types the binaries
//! and test suites use.

pub mod error;
pub mod fit;
pub mod geometry;
pub mod heisenberg;
pub mod kernels;
pub mod models;
pub mod phase;
pub mod quad;
pub mod scalar;
pub mod scaling;
pub mod smoothing;
pub mod special;

pub use error::{Error, Result};

/// Double-precision aliases for the generic core types.
pub type HeisenbergPoint64 = heisenberg::HeisenbergPoint<f64>;
pub type SiegelPoint64 = heisenberg::SiegelPoint<f64>;
pub type TubePoint64 = models::TubePoint<f64>;
pub type BoundaryPoint64 = models::BoundaryPoint<f64>;
pub type HeisenbergChart64 = geometry::HeisenbergChart<f64>;
pub type SmoothingFunction64 = smoothing::SmoothingFunction<f64>;
pub type PreparedKernel64 = kernels::PreparedKernel<f64>;
pub type PhaseReport64 = phase::PhaseReport<f64>;
pub type ScalingReport64 = scaling::ScalingReport<f64>;
