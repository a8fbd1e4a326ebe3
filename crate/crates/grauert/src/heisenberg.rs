//! The reduced Heisenberg group of degree m-1, its affine action on the
//! Siegel domain D_m, and the level-one model Szegő kernel
//!
//!   Π₁(θ, ζ; φ, η) = π^{-(m-1)} e^{i(θ-φ)} e^{ζ·η̄ - |ζ|²/2 - |η|²/2},
//!
//! together with the leading exponential factor the rescaled tube kernels
//! converge to.
//!
//! Convention: the group law uses the conjugated imaginary part
//! Im(ζ·η̄), which is the form compatible with the affine action on D_m
//! and makes (-θ, -ζ) the inverse.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Absolute tolerance for classifying a point against ∂D_m.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// A point (θ, ζ) of the reduced Heisenberg group of degree `zeta.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergPoint<S> {
    pub theta: S,
    pub zeta: Vec<Complex<S>>,
}

impl<S: Scalar> HeisenbergPoint<S> {
    pub fn new(theta: S, zeta: Vec<Complex<S>>) -> Self {
        Self { theta, zeta }
    }

    /// Group degree m-1 (zero for the degenerate circle case m = 1).
    pub fn degree(&self) -> usize {
        self.zeta.len()
    }

    pub fn identity(degree: usize) -> Self {
        Self {
            theta: S::zero(),
            zeta: vec![Complex::new(S::zero(), S::zero()); degree],
        }
    }

    /// Inverse under the conjugated group law: (-θ, -ζ).
    pub fn inverse(&self) -> Self {
        Self {
            theta: -self.theta,
            zeta: self.zeta.iter().map(|z| -z).collect(),
        }
    }
}

/// Ambient point ζ = (ζ₀, …, ζ_{m-1}) of C^m carrying the Siegel domain data.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint<S> {
    pub coords: Vec<Complex<S>>,
}

impl<S: Scalar> SiegelPoint<S> {
    pub fn new(coords: Vec<Complex<S>>) -> Self {
        assert!(
            !coords.is_empty(),
            "Siegel points need at least one coordinate"
        );
        Self { coords }
    }

    /// Im ζ₀ - Σ_{j>=1} |ζ_j|², positive inside D_m.
    pub fn defect(&self) -> S {
        let mut s = self.coords[0].im;
        for z in &self.coords[1..] {
            s = s - z.norm_sqr();
        }
        s
    }
}

/// Position of a point relative to ∂D_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SiegelRegion {
    Interior,
    Boundary,
    Exterior,
}

/// Classify against ∂D_m: the sign of Im ζ₀ - Σ|ζ_j|², with a closed
/// boundary band of half-width `BOUNDARY_TOL`.
pub fn siegel_classify<S: Scalar>(p: &SiegelPoint<S>) -> SiegelRegion {
    let d = p.defect();
    if d.abs() <= S::of(BOUNDARY_TOL) {
        SiegelRegion::Boundary
    } else if d > S::zero() {
        SiegelRegion::Interior
    } else {
        SiegelRegion::Exterior
    }
}

fn check_degree<S: Scalar>(a: &HeisenbergPoint<S>, b: &HeisenbergPoint<S>) -> Result<()> {
    if a.degree() != b.degree() {
        return Err(Error::DimensionMismatch {
            expected: a.degree(),
            got: b.degree(),
        });
    }
    Ok(())
}

/// Group product (θ_a + θ_b + 2 Im(ζ_a · ζ̄_b), ζ_a + ζ_b).
pub fn group_mul<S: Scalar>(
    a: &HeisenbergPoint<S>,
    b: &HeisenbergPoint<S>,
) -> Result<HeisenbergPoint<S>> {
    check_degree(a, b)?;
    let mut twist = S::zero();
    for (za, zb) in a.zeta.iter().zip(b.zeta.iter()) {
        twist += (za * zb.conj()).im;
    }
    Ok(HeisenbergPoint {
        theta: a.theta + b.theta + S::of(2.0) * twist,
        zeta: a
            .zeta
            .iter()
            .zip(b.zeta.iter())
            .map(|(x, y)| x + y)
            .collect(),
    })
}

/// Level-one model Szegő kernel Π₁(a, b) on the reduced group of degree m-1.
pub fn model_szego_kernel<S: Scalar>(
    a: &HeisenbergPoint<S>,
    b: &HeisenbergPoint<S>,
) -> Result<Complex<S>> {
    check_degree(a, b)?;
    let mut expo = Complex::new(S::zero(), a.theta - b.theta);
    for (za, zb) in a.zeta.iter().zip(b.zeta.iter()) {
        expo = expo + za * zb.conj();
        expo.re = expo.re - S::of(0.5) * (za.norm_sqr() + zb.norm_sqr());
    }
    let prefactor = S::PI().powi(-(a.degree() as i32));
    Ok(expo.exp() * prefactor)
}

/// Holomorphic affine action of (θ, z) on ζ ∈ C^m:
/// ζ₀' = ζ₀ + θ + i|z|² + 2i Σ ζ_j z̄_j,  ζ_j' = ζ_j + z_j.
pub fn affine_action<S: Scalar>(
    h: &HeisenbergPoint<S>,
    p: &SiegelPoint<S>,
) -> Result<SiegelPoint<S>> {
    if p.coords.len() != h.degree() + 1 {
        return Err(Error::DimensionMismatch {
            expected: h.degree() + 1,
            got: p.coords.len(),
        });
    }
    let mut z0 = p.coords[0] + Complex::new(h.theta, S::zero());
    let mut zsq = S::zero();
    for (zeta_j, z_j) in p.coords[1..].iter().zip(h.zeta.iter()) {
        zsq += z_j.norm_sqr();
        z0 = z0 + Complex::<S>::i() * S::of(2.0) * zeta_j * z_j.conj();
    }
    z0 = z0 + Complex::new(S::zero(), zsq);
    let mut coords = Vec::with_capacity(p.coords.len());
    coords.push(z0);
    for (zeta_j, z_j) in p.coords[1..].iter().zip(h.zeta.iter()) {
        coords.push(zeta_j + z_j);
    }
    Ok(SiegelPoint { coords })
}

/// Leading factor of the scaling asymptotics in Heisenberg coordinates:
///
///   exp( (1/τ) ( (i/2)(θ - φ) - |u|²/2 - |v|²/2 + u·v̄ ) ).
///
/// The transverse pairing is u·v̄ = Σ u_j v̄_j, holomorphic in the first
/// slot and antiholomorphic in the second; this agrees with the
/// identification of the rescaled kernel with
/// π^{m-1} Π₁(θ/2τ, u/√τ; φ/2τ, v/√τ).
pub fn theorem_leading_factor<S: Scalar>(
    tau: S,
    theta: S,
    phi: S,
    u: &[Complex<S>],
    v: &[Complex<S>],
) -> Result<Complex<S>> {
    if tau <= S::zero() {
        return Err(Error::NonPositiveRadius(tau.to_f64().unwrap_or(f64::NAN)));
    }
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let mut expo = Complex::new(S::zero(), S::of(0.5) * (theta - phi));
    for (uj, vj) in u.iter().zip(v.iter()) {
        expo = expo + uj * vj.conj();
        expo.re = expo.re - S::of(0.5) * (uj.norm_sqr() + vj.norm_sqr());
    }
    Ok((expo / tau).exp())
}
