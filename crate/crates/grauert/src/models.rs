//! Flat model manifolds: the circle and the flat m-torus with period 2π
//! per coordinate.  These carry exact spectra (lattice modes k ∈ Z^m with
//! eigenvalue |k|), entire eigenfunctions (2π)^{-m/2} e^{ik·z}, an exact
//! complexified distance, and an exact Grauert tube function √ρ = |Im z|.
//!
//! The boundary ∂M_τ ≅ T^m × S^{m-1}_τ carries the measure
//! dμ_τ = τ^m dx ⊗ dσ(ω), the flat evaluation of the contact volume
//! α ∧ ω^{m-1} with the overall constant normalized to one (all theorem
//! checks use diagonal-normalized kernels, so absolute kernel values carry
//! this convention).

use crate::error::{Error, Result};
use crate::quad::adaptive_gl;
use crate::scalar::Scalar;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Tolerance on | |y| - τ | for boundary membership.
pub const BOUNDARY_RADIUS_TOL: f64 = 1e-12;

/// Flow direction along the boundary: `sign` multiplies t·y/|y|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn sign<S: Scalar>(self) -> S {
        match self {
            Orientation::Plus => S::one(),
            Orientation::Minus => -S::one(),
        }
    }
}

/// The direction of the Reeb flow on ∂M_τ in the convention of this crate:
/// the one along which the Heisenberg-chart θ coordinate drifts at speed
/// +2τ and the Toeplitz spectrum is asymptotically positive.
pub const REEB_ORIENTATION: Orientation = Orientation::Minus;

/// A flat model manifold: T^m with all periods fixed at 2π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatModel {
    dim: usize,
}

/// A lattice mode k ∈ Z^m with Laplace eigenvalue |k|.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeMode {
    pub k: Vec<i64>,
}

impl LatticeMode {
    pub fn new(k: Vec<i64>) -> Self {
        Self { k }
    }

    /// Exact integer |k|².
    pub fn norm_sq(&self) -> i64 {
        self.k.iter().map(|&x| x * x).sum()
    }

    /// Eigenvalue λ_k = |k|.
    pub fn eigenvalue<S: Scalar>(&self) -> S {
        S::of(self.norm_sq() as f64).sqrt()
    }
}

/// A point of the complexified torus, z = x + iy with x reduced to [-π, π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubePoint<S> {
    pub z: Vec<Complex<S>>,
}

impl<S: Scalar> TubePoint<S> {
    pub fn new(z: Vec<Complex<S>>) -> Self {
        let z = z
            .into_iter()
            .map(|c| Complex::new(reduce_angle(c.re), c.im))
            .collect();
        Self { z }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn x(&self) -> Vec<S> {
        self.z.iter().map(|c| c.re).collect()
    }

    pub fn y(&self) -> Vec<S> {
        self.z.iter().map(|c| c.im).collect()
    }
}

/// A point of ∂M_τ stored as (x, y) with |y| = τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Scalar> BoundaryPoint<S> {
    /// Validates | |y| - τ | <= BOUNDARY_RADIUS_TOL · max(1, τ).
    pub fn new(x: Vec<S>, y: Vec<S>, tau: S) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        let r = norm(&y);
        let defect = (r - tau).abs();
        if defect > S::of(BOUNDARY_RADIUS_TOL) * S::one().max(tau) {
            return Err(Error::NotOnBoundary {
                defect: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            x: x.into_iter().map(reduce_angle).collect(),
            y,
        })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Embed into the tube as x + iy.
    pub fn to_tube(&self) -> TubePoint<S> {
        TubePoint::new(
            self.x
                .iter()
                .zip(self.y.iter())
                .map(|(&a, &b)| Complex::new(a, b))
                .collect(),
        )
    }
}

/// Reduce an angle to the representative in [-π, π).
pub fn reduce_angle<S: Scalar>(x: S) -> S {
    let two_pi = S::of(2.0) * S::PI();
    let mut r = x % two_pi;
    if r < -S::PI() {
        r += two_pi;
    }
    if r >= S::PI() {
        r -= two_pi;
    }
    r
}

pub fn norm<S: Scalar>(v: &[S]) -> S {
    v.iter().map(|&x| x * x).sum::<S>().sqrt()
}

impl FlatModel {
    /// The circle S¹ (m = 1).
    pub fn circle() -> Self {
        Self { dim: 1 }
    }

    /// The flat m-torus.
    pub fn torus(m: usize) -> Self {
        assert!(m >= 1, "model dimension must be at least 1");
        Self { dim: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    /// All modes k ∈ Z^m with |k| <= Λ, in lexicographic order.
    pub fn enumerate_modes(&self, cutoff: f64) -> Vec<LatticeMode> {
        assert!(cutoff >= 0.0);
        self.enumerate_shell(0.0, cutoff)
    }

    /// All modes with rmin <= |k| <= rmax, in lexicographic order.
    pub fn enumerate_shell(&self, rmin: f64, rmax: f64) -> Vec<LatticeMode> {
        let mut out = Vec::new();
        if rmax < 0.0 || rmax < rmin {
            return out;
        }
        let lo2 = if rmin <= 0.0 { 0.0 } else { rmin * rmin };
        let hi2 = rmax * rmax;
        let bound = rmax.floor() as i64;
        let mut k = vec![0i64; self.dim];
        self.enumerate_rec(0, 0.0, lo2, hi2, bound, &mut k, &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        axis: usize,
        partial_sq: f64,
        lo2: f64,
        hi2: f64,
        bound: i64,
        k: &mut Vec<i64>,
        out: &mut Vec<LatticeMode>,
    ) {
        if axis == self.dim {
            if partial_sq >= lo2 - 1e-9 && partial_sq <= hi2 + 1e-9 {
                // Exact integer comparison at the rim.
                let n2: i64 = k.iter().map(|&x| x * x).sum();
                let n2f = n2 as f64;
                if n2f >= lo2 && n2f <= hi2 {
                    out.push(LatticeMode::new(k.clone()));
                }
            }
            return;
        }
        let remaining = hi2 - partial_sq;
        if remaining < 0.0 {
            return;
        }
        let reach = remaining.sqrt().floor() as i64;
        let reach = reach.min(bound);
        for v in -reach..=reach {
            k[axis] = v;
            self.enumerate_rec(
                axis + 1,
                partial_sq + (v * v) as f64,
                lo2,
                hi2,
                bound,
                k,
                out,
            );
        }
        k[axis] = 0;
    }

    /// Analytic continuation of the L²-normalized eigenfunction:
    /// φ_k^C(z) = (2π)^{-m/2} e^{ik·z}.
    pub fn complexified_eigenfunction<S: Scalar>(
        &self,
        mode: &LatticeMode,
        z: &TubePoint<S>,
    ) -> Complex<S> {
        let mut expo = Complex::new(S::zero(), S::zero());
        for (&kj, zj) in mode.k.iter().zip(z.z.iter()) {
            expo = expo + Complex::<S>::i() * zj * S::of(kj as f64);
        }
        let norm = (S::of(2.0) * S::PI()).powf(-S::of_usize(self.dim) * S::of(0.5));
        expo.exp() * norm
    }

    /// Near-diagonal representative of the coordinate separation
    /// Re z_j - Re w_j, shifted by full periods into (-π, π).
    ///
    /// Antipodal separations have no distinguished representative and are
    /// reported as branch violations rather than silently wrapped.
    pub fn separation<S: Scalar>(&self, a: S, b: S) -> Result<S> {
        let d = reduce_angle(a - b);
        if d.abs() >= S::PI() * (S::one() - S::of(1e-9)) {
            return Err(Error::BranchViolation {
                sep: d.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(d)
    }

    /// Analytic extension of the squared distance, r²_C(z, w̄) = Σ (z_j - w̄_j)²,
    /// evaluated on the near-diagonal branch.
    pub fn complexified_distance_sq<S: Scalar>(
        &self,
        z: &TubePoint<S>,
        w: &TubePoint<S>,
    ) -> Result<Complex<S>> {
        self.check_dim(z.dim())?;
        self.check_dim(w.dim())?;
        let mut acc = Complex::new(S::zero(), S::zero());
        for (zj, wj) in z.z.iter().zip(w.z.iter()) {
            let dre = self.separation(zj.re, wj.re)?;
            let d = Complex::new(dre, zj.im + wj.im);
            acc = acc + d * d;
        }
        Ok(acc)
    }

    /// Grauert tube function √ρ(z) = (1/2i) sqrt(r²_C(z, z̄)); equals |Im z|.
    pub fn grauert_sqrt_rho<S: Scalar>(&self, z: &TubePoint<S>) -> S {
        // r²_C(z, z̄) = Σ (2i y_j)² = -4|y|² is real and nonpositive, so the
        // principal square root is 2i|y| and the quotient by 2i is |y|.
        let r2 = self
            .complexified_distance_sq(z, z)
            .expect("diagonal arguments are always near-diagonal");
        debug_assert!(r2.im.abs() <= S::of(1e-12) * (S::one() + r2.re.abs()));
        (-r2.re).max(S::zero()).sqrt() * S::of(0.5)
    }

    /// Riemannian distance between the base projections (flat torus metric).
    pub fn base_distance<S: Scalar>(&self, a: &[S], b: &[S]) -> Result<S> {
        let mut acc = S::zero();
        for (&x, &y) in a.iter().zip(b.iter()) {
            let d = self.separation(x, y)?;
            acc += d * d;
        }
        Ok(acc.sqrt())
    }

    /// Transferred geodesic flow on ∂M_τ: x ↦ x + sign·t·y/|y|, y fixed.
    pub fn boundary_flow<S: Scalar>(
        &self,
        t: S,
        p: &BoundaryPoint<S>,
        orientation: Orientation,
    ) -> Result<BoundaryPoint<S>> {
        self.check_dim(p.dim())?;
        let r = norm(&p.y);
        if r <= S::zero() {
            return Err(Error::DegenerateDirection);
        }
        let s = orientation.sign::<S>() * t / r;
        let x =
            p.x.iter()
                .zip(p.y.iter())
                .map(|(&x, &y)| reduce_angle(x + s * y))
                .collect();
        Ok(BoundaryPoint { x, y: p.y.clone() })
    }

    /// ∫_{S^{m-1}} f(n·ω) dσ(ω) for the Euclidean unit sphere, reduced by
    /// rotational symmetry to a one-dimensional adaptive quadrature.
    ///
    /// For m = 1 the "sphere" S⁰ is the two points ±1 with counting measure.
    pub fn sphere_integral<S: Scalar>(&self, n: S, f: impl Fn(S) -> S) -> Result<S> {
        match self.dim {
            0 => Err(Error::UnsupportedDimension(0)),
            1 => Ok(f(n) + f(-n)),
            m => {
                // |S^{m-2}| ∫_0^π f(n cos θ) sin^{m-2} θ dθ
                let eq = sphere_surface::<S>(m - 2);
                let mut g = |theta: S| {
                    let s = theta.sin();
                    f(n * theta.cos()) * s.powi((m - 2) as i32)
                };
                let v = adaptive_gl(S::zero(), S::PI(), S::of(1e-12), S::of(1e-300), &mut g)?;
                Ok(eq * v)
            }
        }
    }

    /// exp(-2τ|k|) · ‖e^{ik·z}‖²_{L²(∂M_τ, dμ_τ)}, the overflow-safe form of
    /// the Hardy norm.  Depends on k only through |k|; `n` may be any
    /// nonnegative real interpolation of |k|.
    pub fn hardy_norm_sq_scaled<S: Scalar>(&self, n: S, tau: S) -> Result<S> {
        if tau <= S::zero() {
            return Err(Error::NonPositiveRadius(tau.to_f64().unwrap_or(f64::NAN)));
        }
        let torus = (S::of(2.0) * S::PI()).powi(self.dim as i32);
        let measure = tau.powi(self.dim as i32) * torus;
        // ∫ e^{-2τ(n + n ω₁)} dσ(ω), written with the exponent shifted so the
        // integrand is at most 1.
        let sphere = self.sphere_integral(n, |t| ((-S::of(2.0) * tau) * (n + t)).exp())?;
        Ok(measure * sphere)
    }

    /// ‖e^{ik·z}‖²_{L²(∂M_τ, dμ_τ)}.  Overflows for 2τ|k| beyond ~700; the
    /// kernel machinery works with the scaled form instead.
    pub fn hardy_norm_sq<S: Scalar>(&self, mode: &LatticeMode, tau: S) -> Result<S> {
        let n = mode.eigenvalue::<S>();
        Ok(self.hardy_norm_sq_scaled(n, tau)? * (S::of(2.0) * tau * n).exp())
    }

    /// Eigenvalue of the Toeplitz operator Π_τ D_√ρ Π_τ on the Fourier mode
    /// e^{ik·z}, computed by spherical quadrature:
    ///
    ///   μ_k = orientation · ∫ (k·ω) e^{-2τ k·ω} dσ(ω) / ∫ e^{-2τ k·ω} dσ(ω).
    ///
    /// With `REEB_ORIENTATION` (the default flow direction used throughout)
    /// the spectrum is nonnegative and μ_k ~ |k|.  For m = 1 the boundary has
    /// two components and the quotient is taken on the component aligned with
    /// the flow (the one carrying the mode's Hardy mass), where differentiation
    /// along the flow gives the exact eigenvalue |k|.
    pub fn toeplitz_eigenvalue<S: Scalar>(
        &self,
        mode: &LatticeMode,
        tau: S,
        orientation: Orientation,
    ) -> Result<S> {
        let n = mode.eigenvalue::<S>();
        self.toeplitz_eigenvalue_at(n, tau, orientation)
    }

    /// Continuous-in-|k| form of `toeplitz_eigenvalue`.
    pub fn toeplitz_eigenvalue_at<S: Scalar>(
        &self,
        n: S,
        tau: S,
        orientation: Orientation,
    ) -> Result<S> {
        if tau <= S::zero() {
            return Err(Error::NonPositiveRadius(tau.to_f64().unwrap_or(f64::NAN)));
        }
        if n == S::zero() {
            return Ok(S::zero());
        }
        if self.dim == 1 {
            // Aligned component: the mode's Hardy mass sits on the component
            // where the damped modulus is 1; there D_√ρ acts by -|n| for the
            // Plus flow and +|n| for the Reeb (Minus) flow.
            return Ok(-orientation.sign::<S>() * n);
        }
        let denom = self.sphere_integral(n, |t| ((-S::of(2.0) * tau) * (n + t)).exp())?;
        let numer = self.sphere_integral(n, |t| t * ((-S::of(2.0) * tau) * (n + t)).exp())?;
        Ok(orientation.sign::<S>() * numer / denom)
    }
}

/// Surface measure |S^d| of the unit d-sphere (|S⁰| = 2, |S¹| = 2π, …).
pub fn sphere_surface<S: Scalar>(d: usize) -> S {
    match d {
        0 => S::of(2.0),
        1 => S::of(2.0) * S::PI(),
        2 => S::of(4.0) * S::PI(),
        _ => {
            // 2 π^{(d+1)/2} / Γ((d+1)/2) via the recurrence |S^d| = 2π/(d-1) |S^{d-2}|.
            S::of(2.0) * S::PI() / S::of_usize(d - 1) * sphere_surface::<S>(d - 2)
        }
    }
}
