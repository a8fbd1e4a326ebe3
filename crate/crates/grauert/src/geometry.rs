//! Boundary geometry of the Grauert tube: the defining function
//! φ_τ = ρ - τ², its polarization, the Calabi diastasis, and degree-2
//! holomorphic normal forms ("Heisenberg charts") at boundary points.
//!
//! A chart at p ∈ ∂M_τ is a polynomial map z ↦ (z₀, u) of degree 2 with
//!
//!   φ_τ ∘ chart⁻¹ (z₀, u) = -Im z₀ + |u|² + O(|z₀||u| + |z₀|² + |u|³),
//!
//! built in five steps: translate p to the origin, rotate the co-direction
//! y_p onto the last axis, pick the holomorphic linear functional z₀ with
//! dφ_τ|_p = -Im dz₀, normalize the transverse Levi block to the identity,
//! and absorb the pure holomorphic quadratic of φ_τ into z₀.  All
//! derivatives are taken from the polarized defining function by central
//! differences, which are exact for the flat models (the polarization is a
//! quadratic polynomial).

use crate::error::{Error, Result};
use crate::models::{norm, BoundaryPoint, FlatModel, Orientation, TubePoint, REEB_ORIENTATION};
use crate::scalar::Scalar;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Boundary defining function φ_τ(z) = ρ(z) - τ², negative inside the tube.
pub fn defining_function<S: Scalar>(model: &FlatModel, z: &TubePoint<S>, tau: S) -> S {
    let sr = model.grauert_sqrt_rho(z);
    sr * sr - tau * tau
}

/// Polarized defining function φ_τ(z, w̄) = -¼ r²_C(z, w̄) - τ²,
/// holomorphic in z and antiholomorphic in w; equals φ_τ on the diagonal.
pub fn polarized_phi<S: Scalar>(
    model: &FlatModel,
    z: &TubePoint<S>,
    w: &TubePoint<S>,
    tau: S,
) -> Result<Complex<S>> {
    let r2 = model.complexified_distance_sq(z, w)?;
    Ok(-r2 * S::of(0.25) - Complex::new(tau * tau, S::zero()))
}

/// Calabi diastasis D(z,w) = φ(z,z̄) + φ(w,w̄) - φ(z,w̄) - φ(w,z̄).
pub fn diastasis<S: Scalar>(
    model: &FlatModel,
    z: &TubePoint<S>,
    w: &TubePoint<S>,
    tau: S,
) -> Result<S> {
    let total = polarized_phi(model, z, z, tau)? + polarized_phi(model, w, w, tau)?
        - polarized_phi(model, z, w, tau)?
        - polarized_phi(model, w, z, tau)?;
    debug_assert!(total.im.abs() <= S::of(1e-12) * (S::one() + total.re.abs()));
    Ok(total.re)
}

/// Ambient coordinates (Θ(λ), u/√λ) of a rescaled boundary point:
/// Re Θ = θ/λ and Im Θ solves φ_τ(Θ, u/√λ) = 0.
#[derive(Debug, Clone, Serialize)]
pub struct AmbientLift<S> {
    pub theta: S,
    pub im_theta: S,
    pub u: Vec<Complex<S>>,
}

/// Degree-2 holomorphic normal form at a boundary point.
///
/// Chart coordinates of an ambient point z are computed from
/// ζ' = R (z - p) as z₀ = c·ζ' + ζ'ᵀ Q ζ' and u = A ζ'_⊥.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeisenbergChart<S> {
    pub model: FlatModel,
    pub tau: S,
    pub base: BoundaryPoint<S>,
    /// Real orthogonal rotation with R y_p = τ e_m.
    pub rotation: Vec<Vec<S>>,
    /// Linear part: row 0 is the z₀ functional, rows 1..m the u frame.
    pub linear_map: Vec<Vec<Complex<S>>>,
    /// Symmetric quadratic correction feeding the z₀ component.
    pub quadratic_correction: Vec<Vec<Complex<S>>>,
    /// Conservative chart-norm radius within which the normal form is used.
    pub validity_radius: S,
}

/// Chart coordinates of an ambient point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoords<S> {
    pub z0: Complex<S>,
    pub u: Vec<Complex<S>>,
}

impl<S: Scalar> ChartCoords<S> {
    /// |z₀| + Σ |u_j|, the norm used for validity checks.
    pub fn chart_norm(&self) -> S {
        self.z0.norm() + self.u.iter().map(|c| c.norm()).sum::<S>()
    }
}

/// Build the Heisenberg chart at p ∈ ∂M_τ.
pub fn build_heisenberg_chart<S: Scalar>(
    model: &FlatModel,
    p: &BoundaryPoint<S>,
    tau: S,
) -> Result<HeisenbergChart<S>> {
    if tau <= S::zero() {
        return Err(Error::NonPositiveRadius(tau.to_f64().unwrap_or(f64::NAN)));
    }
    let m = model.dim();
    if p.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: p.dim(),
        });
    }
    let r = norm(&p.y);
    if (r - tau).abs() > S::of(1e-10) * S::one().max(tau) {
        return Err(Error::NotOnBoundary {
            defect: (r - tau).abs().to_f64().unwrap_or(f64::NAN),
        });
    }

    let rotation = rotation_to_last_axis(&p.y, tau)?;

    // Polarized φ_τ in translated+rotated holomorphic coordinates:
    // G(ζ', η') = φ_τ(p + Rᵀζ', conj-slot p + Rᵀη').
    let to_ambient = |zeta_p: &[Complex<S>]| -> TubePoint<S> {
        let zeta = apply_rt(&rotation, zeta_p);
        TubePoint::new(
            zeta.iter()
                .enumerate()
                .map(|(j, c)| Complex::new(p.x[j], p.y[j]) + c)
                .collect(),
        )
    };
    let g = |zp: &[Complex<S>], ep: &[Complex<S>]| -> Result<Complex<S>> {
        polarized_phi(model, &to_ambient(zp), &to_ambient(ep), tau)
    };

    let h = (S::of(0.05) * tau).max(S::of(1e-3)).min(S::of(0.25));
    let zeros = vec![Complex::new(S::zero(), S::zero()); m];

    // Base value should vanish on the boundary.
    let g00 = g(&zeros, &zeros)?;
    if g00.norm() > S::of(1e-9) * S::one().max(tau * tau) {
        return Err(Error::DegenerateGeometry(format!(
            "polarized defining function does not vanish at the base point: {g00:?}"
        )));
    }

    // Holomorphic gradient g_j = ∂G/∂ζ'_j, then z₀ row c = -2i g.
    let mut c_row = vec![Complex::new(S::zero(), S::zero()); m];
    for j in 0..m {
        let mut zp = zeros.clone();
        zp[j] = Complex::new(h, S::zero());
        let f_plus = g(&zp, &zeros)?;
        zp[j] = Complex::new(-h, S::zero());
        let f_minus = g(&zp, &zeros)?;
        let grad = (f_plus - f_minus) / (S::of(2.0) * h);
        c_row[j] = Complex::new(S::zero(), -S::of(2.0)) * grad;
    }

    // Transverse Levi block T_{jk} = ∂²G/∂ζ'_j ∂η̄'_k at the base point.
    let mt = m - 1;
    let mut levi = vec![vec![Complex::new(S::zero(), S::zero()); mt]; mt];
    for j in 0..mt {
        for k in 0..mt {
            let mut zp = zeros.clone();
            let mut ep = zeros.clone();
            let mut acc = Complex::new(S::zero(), S::zero());
            for (sz, se) in [(h, h), (h, -h), (-h, h), (-h, -h)] {
                zp[j] = Complex::new(sz, S::zero());
                ep[k] = Complex::new(se, S::zero());
                let v = g(&zp, &ep)?;
                let sign = if sz * se > S::zero() {
                    S::one()
                } else {
                    -S::one()
                };
                acc = acc + v * sign;
            }
            levi[j][k] = acc / (S::of(4.0) * h * h);
        }
    }
    let u_frame = levi_frame(&levi)?;

    // Pure holomorphic Hessian H_{jk} = ∂²G/∂ζ'_j ∂ζ'_k; correction Q = -i H.
    let mut quad = vec![vec![Complex::new(S::zero(), S::zero()); m]; m];
    for j in 0..m {
        for k in 0..m {
            let mut acc = Complex::new(S::zero(), S::zero());
            for (sj, sk) in [(h, h), (h, -h), (-h, h), (-h, -h)] {
                let mut zp = zeros.clone();
                zp[j] = zp[j] + Complex::new(sj, S::zero());
                zp[k] = zp[k] + Complex::new(sk, S::zero());
                let v = g(&zp, &zeros)?;
                let sign = if sj * sk > S::zero() {
                    S::one()
                } else {
                    -S::one()
                };
                acc = acc + v * sign;
            }
            let hess = acc / (S::of(4.0) * h * h);
            quad[j][k] = Complex::new(S::zero(), -S::one()) * hess;
        }
    }

    // Assemble the linear map: z₀ row then the u frame (zero in the normal slot).
    let mut linear = vec![vec![Complex::new(S::zero(), S::zero()); m]; m];
    linear[0] = c_row;
    for j in 0..mt {
        for k in 0..mt {
            linear[1 + j][k] = u_frame[j][k];
        }
    }
    check_linear_conditioning(&linear)?;

    Ok(HeisenbergChart {
        model: *model,
        tau,
        base: p.clone(),
        rotation,
        linear_map: linear,
        quadratic_correction: quad,
        validity_radius: S::of(0.3) * tau,
    })
}

impl<S: Scalar> HeisenbergChart<S> {
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Chart coordinates of the ambient point z (near-diagonal branch).
    pub fn forward(&self, z: &TubePoint<S>) -> Result<ChartCoords<S>> {
        let m = self.dim();
        if z.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: z.dim(),
            });
        }
        let mut zeta = Vec::with_capacity(m);
        for j in 0..m {
            let dx = self.model.separation(z.z[j].re, self.base.x[j])?;
            zeta.push(Complex::new(dx, z.z[j].im - self.base.y[j]));
        }
        let zp = apply_r(&self.rotation, &zeta);
        let mut z0 = Complex::new(S::zero(), S::zero());
        for j in 0..m {
            z0 = z0 + self.linear_map[0][j] * zp[j];
        }
        for j in 0..m {
            for k in 0..m {
                z0 = z0 + self.quadratic_correction[j][k] * zp[j] * zp[k];
            }
        }
        let mut u = Vec::with_capacity(m - 1);
        for row in 1..m {
            let mut acc = Complex::new(S::zero(), S::zero());
            for k in 0..m {
                acc = acc + self.linear_map[row][k] * zp[k];
            }
            u.push(acc);
        }
        Ok(ChartCoords { z0, u })
    }

    /// Ambient point with the given chart coordinates; errors outside the
    /// validity radius.
    pub fn inverse(&self, coords: &ChartCoords<S>) -> Result<TubePoint<S>> {
        let size = coords.chart_norm();
        if size > self.validity_radius {
            return Err(Error::ChartValidity {
                size: size.to_f64().unwrap_or(f64::NAN),
                radius: self.validity_radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        self.inverse_unchecked(coords)
    }

    fn inverse_unchecked(&self, coords: &ChartCoords<S>) -> Result<TubePoint<S>> {
        let m = self.dim();
        if coords.u.len() != m - 1 {
            return Err(Error::DimensionMismatch {
                expected: m - 1,
                got: coords.u.len(),
            });
        }
        // Transverse slots from the triangular u frame.
        let zp_t = solve_upper(&self.linear_map, &coords.u)?;
        // Normal slot from the quadratic z₀ = c·ζ' + ζ'ᵀQζ'.
        let q = &self.quadratic_correction;
        let c = &self.linear_map[0];
        let last = m - 1;
        let alpha = q[last][last];
        let mut beta = c[last];
        let mut gamma = -coords.z0;
        for j in 0..m - 1 {
            beta = beta + (q[j][last] + q[last][j]) * zp_t[j];
            gamma = gamma + c[j] * zp_t[j];
            for k in 0..m - 1 {
                gamma = gamma + q[j][k] * zp_t[j] * zp_t[k];
            }
        }
        let w = solve_quadratic_small_root(alpha, beta, gamma)?;
        // Exact in the data; guard against a wildly wrong branch anyway.
        if w.norm() > S::of(4.0) * (S::one().max(self.tau)) {
            return Err(Error::DegenerateGeometry(
                "chart inverse selected a far branch".into(),
            ));
        }
        let mut zp = zp_t;
        zp.push(w);
        let zeta = apply_rt(&self.rotation, &zp);
        Ok(TubePoint::new(
            (0..m)
                .map(|j| Complex::new(self.base.x[j], self.base.y[j]) + zeta[j])
                .collect(),
        ))
    }

    /// Solve φ_τ(Θ, u/√λ) = 0 for Im Θ with Re Θ = θ/λ fixed
    /// (bracketing + bisection with a Newton-style secant polish).
    pub fn ambient_lift(&self, theta: S, u: &[Complex<S>], lambda: S) -> Result<AmbientLift<S>> {
        if lambda < S::one() {
            return Err(Error::ScaleDomain(format!(
                "ambient lifts need lambda >= 1, got {lambda}"
            )));
        }
        let re_theta = theta / lambda;
        let sqrt_l = lambda.sqrt();
        let u_scaled: Vec<Complex<S>> = u.iter().map(|c| c / sqrt_l).collect();
        let u_size: S = u_scaled.iter().map(|c| c.norm()).sum();

        // The returned point must satisfy the validity radius; bracketing
        // excursions of the root finder get a small slack beyond it.
        let slack = self.validity_radius * S::of(1.05);
        let phi_at = |s: S| -> Result<S> {
            let coords = ChartCoords {
                z0: Complex::new(re_theta, s),
                u: u_scaled.clone(),
            };
            let size = coords.chart_norm();
            if size > slack {
                return Err(Error::ChartValidity {
                    size: size.to_f64().unwrap_or(f64::NAN),
                    radius: self.validity_radius.to_f64().unwrap_or(f64::NAN),
                });
            }
            let z = self.inverse_unchecked(&coords)?;
            Ok(defining_function(&self.model, &z, self.tau))
        };

        // φ ≈ -Im z₀ + |u|², so the root sits near |u|² with a correction
        // quadratic in the chart size; bracket tightly and widen on demand.
        let center = u_size * u_size;
        let mut half = center * S::of(0.25) + S::of(1e-5) * (S::one() + self.tau * self.tau);
        let mut lo = center - half;
        let mut hi = center + half;
        let mut flo = phi_at(lo)?;
        let mut fhi = phi_at(hi)?;
        let mut widen = 0;
        while flo * fhi > S::zero() {
            widen += 1;
            if widen > 10 {
                return Err(Error::RootBracket("Im Theta in the ambient lift".into()));
            }
            half = half * S::of(3.0);
            lo = center - half;
            hi = center + half;
            flo = phi_at(lo)?;
            fhi = phi_at(hi)?;
        }
        // Bisection to the requested 1e-13 scale, then a secant polish.
        for _ in 0..200 {
            let mid = (lo + hi) * S::of(0.5);
            let fm = phi_at(mid)?;
            if fm == S::zero() {
                lo = mid;
                hi = mid;
                break;
            }
            if flo * fm <= S::zero() {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
            if (hi - lo).abs() <= S::of(1e-15) * (S::one() + center.abs()) {
                break;
            }
        }
        let mut root = (lo + hi) * S::of(0.5);
        if fhi != flo {
            let secant = hi - fhi * (hi - lo) / (fhi - flo);
            if secant.is_finite() && secant >= lo.min(hi) && secant <= lo.max(hi) {
                root = secant;
            }
        }
        let residual = phi_at(root)?;
        if residual.abs() > S::of(1e-12) * S::one().max(self.tau * self.tau) {
            return Err(Error::QuadratureAccuracy {
                achieved: residual.abs().to_f64().unwrap_or(f64::NAN),
                wanted: 1e-12,
            });
        }
        Ok(AmbientLift {
            theta: re_theta,
            im_theta: root,
            u: u_scaled,
        })
    }

    /// Boundary point with Heisenberg coordinates (θ/λ, u/√λ), enforcing
    /// |φ_τ| <= 1e-12 at the result.
    pub fn rescaled_boundary_point(
        &self,
        theta: S,
        u: &[Complex<S>],
        lambda: S,
    ) -> Result<BoundaryPoint<S>> {
        let lift = self.ambient_lift(theta, u, lambda)?;
        let z = self.inverse_unchecked(&ChartCoords {
            z0: Complex::new(lift.theta, lift.im_theta),
            u: lift.u.clone(),
        })?;
        BoundaryPoint::new(z.x(), z.y(), self.tau)
    }

    /// φ_τ ∘ chart⁻¹ minus its normal form -Im z₀ + |u|².
    pub fn pushforward_remainder(&self, coords: &ChartCoords<S>) -> Result<S> {
        let z = self.inverse(coords)?;
        let phi = defining_function(&self.model, &z, self.tau);
        let model_part = -coords.z0.im + coords.u.iter().map(|c| c.norm_sqr()).sum::<S>();
        Ok(phi - model_part)
    }
}

/// Fitted remainder exponents along the three scaling directions.
#[derive(Debug, Clone, Serialize)]
pub struct RemainderFit<S> {
    pub z0_slope: S,
    /// Absent for m = 1, where there is no transverse direction.
    pub u_slope: Option<S>,
    pub mixed_slope: S,
    /// Directions whose remainders sat at the numerical floor; their slope
    /// is reported as the fit cap.
    pub saturated: Vec<String>,
}

/// Slope cap reported when a remainder is numerically zero at every radius.
pub const REMAINDER_FIT_CAP: f64 = 8.0;

/// Least-squares exponents of sup-remainders against radius along the pure
/// z₀, pure u, and mixed directions.
pub fn chart_remainder_fit<S: Scalar>(
    chart: &HeisenbergChart<S>,
    radii: &[S],
) -> Result<RemainderFit<S>> {
    if radii.len() < 3 {
        return Err(Error::FitFailure("need at least 3 radii".into()));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = chart.dim();
    let floor = S::of(1e-14) * S::one().max(chart.tau * chart.tau);
    let angles = 8;
    let mut saturated = Vec::new();

    let sup_along = |dir: &dyn Fn(S, S) -> ChartCoords<S>| -> Result<Vec<S>> {
        let mut sups = Vec::with_capacity(sorted.len());
        for &r in &sorted {
            let mut sup = S::zero();
            for a in 0..angles {
                let ang = S::of(2.0) * S::PI() * S::of_usize(a) / S::of_usize(angles);
                let rem = chart.pushforward_remainder(&dir(r, ang))?.abs();
                sup = sup.max(rem);
            }
            sups.push(sup);
        }
        Ok(sups)
    };

    let zero_u = vec![Complex::new(S::zero(), S::zero()); m - 1];
    let z0_dir = |r: S, ang: S| ChartCoords {
        z0: Complex::from_polar(r, ang),
        u: zero_u.clone(),
    };
    let u_dir = |r: S, ang: S| {
        let mut u = zero_u.clone();
        u[0] = Complex::from_polar(r, ang);
        ChartCoords {
            z0: Complex::new(S::zero(), S::zero()),
            u,
        }
    };
    let mixed_dir = |r: S, ang: S| {
        let mut u = zero_u.clone();
        if m > 1 {
            u[0] = Complex::from_polar(r, ang + S::of(0.7));
        }
        ChartCoords {
            z0: Complex::from_polar(r, ang),
            u,
        }
    };

    let fit_dir = |sups: Vec<S>, label: &str, saturated: &mut Vec<String>| -> Result<S> {
        if sups.iter().all(|&s| s <= floor) {
            saturated.push(label.to_string());
            return Ok(S::of(REMAINDER_FIT_CAP));
        }
        if sups.iter().any(|&s| s <= floor) {
            // Partially floored data: fit only the resolved radii.
            saturated.push(format!("{label} (partial)"));
        }
        let xs: Vec<S> = sorted
            .iter()
            .zip(&sups)
            .filter(|(_, &s)| s > floor)
            .map(|(&r, _)| r.ln())
            .collect();
        let ys: Vec<S> = sups
            .iter()
            .filter(|&&s| s > floor)
            .map(|&s| s.ln())
            .collect();
        if xs.len() < 3 {
            saturated.push(format!("{label} (floor)"));
            return Ok(S::of(REMAINDER_FIT_CAP));
        }
        // Require residuals to shrink with the radius before trusting a fit.
        for w in ys.windows(2) {
            if w[1] < w[0] - S::of(1e-6) {
                return Err(Error::FitFailure(format!(
                    "non-monotone remainder along {label}: {ys:?}"
                )));
            }
        }
        Ok(crate::fit::fit_line(&xs, &ys)?.0)
    };

    let z0_slope = fit_dir(sup_along(&z0_dir)?, "z0", &mut saturated)?;
    let u_slope = if m > 1 {
        Some(fit_dir(sup_along(&u_dir)?, "u", &mut saturated)?)
    } else {
        None
    };
    let mixed_slope = fit_dir(sup_along(&mixed_dir)?, "mixed", &mut saturated)?;

    Ok(RemainderFit {
        z0_slope,
        u_slope,
        mixed_slope,
        saturated,
    })
}

/// Decomposition of the transferred geodesic flow in chart coordinates:
/// θ(G^t q) - θ(q) - 2τt and u(G^t q) - u(q).
#[derive(Debug, Clone)]
pub struct FlowDefect<S> {
    pub theta_defect: S,
    pub u_defect: Vec<Complex<S>>,
}

/// Flow the point q for time t along the Reeb orientation and report the
/// defect against the model drift (θ + 2τt, u).
pub fn flow_in_chart<S: Scalar>(
    chart: &HeisenbergChart<S>,
    q: &BoundaryPoint<S>,
    t: S,
) -> Result<FlowDefect<S>> {
    if t.abs() > S::of(0.1) * chart.tau {
        return Err(Error::ChartValidity {
            size: t.abs().to_f64().unwrap_or(f64::NAN),
            radius: (S::of(0.1) * chart.tau).to_f64().unwrap_or(f64::NAN),
        });
    }
    let before = chart.forward(&q.to_tube())?;
    let flowed = chart.model.boundary_flow(t, q, REEB_ORIENTATION)?;
    let after = chart.forward(&flowed.to_tube())?;
    Ok(FlowDefect {
        theta_defect: after.z0.re - before.z0.re - S::of(2.0) * chart.tau * t,
        u_defect: after
            .u
            .iter()
            .zip(before.u.iter())
            .map(|(a, b)| a - b)
            .collect(),
    })
}

/// Reeb flow on the boundary (fixed orientation convention).
pub fn reeb_flow<S: Scalar>(
    model: &FlatModel,
    t: S,
    p: &BoundaryPoint<S>,
) -> Result<BoundaryPoint<S>> {
    model.boundary_flow(t, p, REEB_ORIENTATION)
}

/// Flow the base point in the unused positive orientation (diagnostics).
pub fn boundary_flow_oriented<S: Scalar>(
    model: &FlatModel,
    t: S,
    p: &BoundaryPoint<S>,
    orientation: Orientation,
) -> Result<BoundaryPoint<S>> {
    model.boundary_flow(t, p, orientation)
}

// ---------------------------------------------------------------------------
// small dense helpers

/// Real orthogonal matrix sending y (|y| = τ) to τ e_m: the rotation in
/// span{y, e_m} fixing the orthogonal complement; identity when parallel,
/// a π-rotation in the (e_1, e_m) plane when antiparallel.
fn rotation_to_last_axis<S: Scalar>(y: &[S], tau: S) -> Result<Vec<Vec<S>>> {
    let m = y.len();
    let last = m - 1;
    let a: Vec<S> = y.iter().map(|&v| v / tau).collect();
    let mut r = vec![vec![S::zero(); m]; m];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = S::one();
    }
    let dot = a[last];
    if (dot - S::one()).abs() < S::of(1e-14) {
        return Ok(r);
    }
    if (dot + S::one()).abs() < S::of(1e-14) {
        if m == 1 {
            r[0][0] = -S::one();
            return Ok(r);
        }
        r[0][0] = -S::one();
        r[last][last] = -S::one();
        return Ok(r);
    }
    // R = I - (a+b)(a+b)ᵀ/(1+a·b) + 2 b aᵀ with b = e_m.
    let denom = S::one() + dot;
    let mut apb = a.clone();
    apb[last] += S::one();
    for i in 0..m {
        for j in 0..m {
            r[i][j] = r[i][j] - apb[i] * apb[j] / denom;
        }
    }
    for j in 0..m {
        r[last][j] = r[last][j] + S::of(2.0) * a[j];
    }
    Ok(r)
}

fn apply_r<S: Scalar>(r: &[Vec<S>], v: &[Complex<S>]) -> Vec<Complex<S>> {
    r.iter()
        .map(|row| {
            let mut acc = Complex::new(S::zero(), S::zero());
            for (c, x) in row.iter().zip(v.iter()) {
                acc = acc + x * *c;
            }
            acc
        })
        .collect()
}

fn apply_rt<S: Scalar>(r: &[Vec<S>], v: &[Complex<S>]) -> Vec<Complex<S>> {
    let m = v.len();
    let mut out = vec![Complex::new(S::zero(), S::zero()); m];
    for (i, row) in r.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            out[j] = out[j] + v[i] * *c;
        }
    }
    out
}

/// Upper-triangular frame A with AᴴA = Levi block and real positive diagonal,
/// so that the Levi form is the identity in the u coordinates.
fn levi_frame<S: Scalar>(levi: &[Vec<Complex<S>>]) -> Result<Vec<Vec<Complex<S>>>> {
    let n = levi.len();
    // Hermitian Cholesky T = L Lᴴ, then A = Lᴴ.
    let mut l = vec![vec![Complex::new(S::zero(), S::zero()); n]; n];
    for j in 0..n {
        let mut d = levi[j][j].re;
        for k in 0..j {
            d = d - l[j][k].norm_sqr();
        }
        if !(d > S::zero()) {
            return Err(Error::DegenerateGeometry(
                "Levi block is not positive definite".into(),
            ));
        }
        let dj = d.sqrt();
        l[j][j] = Complex::new(dj, S::zero());
        for i in j + 1..n {
            let mut s = levi[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / dj;
        }
    }
    let mut a = vec![vec![Complex::new(S::zero(), S::zero()); n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = l[j][i].conj();
        }
    }
    Ok(a)
}

/// Solve the transverse block of the linear map (rows 1..m, upper triangular
/// by construction) for ζ'_⊥ given u.
fn solve_upper<S: Scalar>(linear: &[Vec<Complex<S>>], u: &[Complex<S>]) -> Result<Vec<Complex<S>>> {
    let n = u.len();
    let mut out = vec![Complex::new(S::zero(), S::zero()); n];
    for i in (0..n).rev() {
        let mut s = u[i];
        for j in i + 1..n {
            s = s - linear[1 + i][j] * out[j];
        }
        let d = linear[1 + i][i];
        if d.norm() < S::of(1e-300) {
            return Err(Error::DegenerateGeometry("singular u frame".into()));
        }
        out[i] = s / d;
    }
    Ok(out)
}

/// Root of αw² + βw + γ = 0 of smallest modulus, via the cancellation-free
/// quotient form.
fn solve_quadratic_small_root<S: Scalar>(
    alpha: Complex<S>,
    beta: Complex<S>,
    gamma: Complex<S>,
) -> Result<Complex<S>> {
    if alpha.norm() < S::of(1e-300) {
        if beta.norm() < S::of(1e-300) {
            return Err(Error::DegenerateGeometry(
                "degenerate normal equation in the chart inverse".into(),
            ));
        }
        return Ok(-gamma / beta);
    }
    let disc = (beta * beta - alpha * gamma * S::of(4.0)).sqrt();
    let d1 = beta + disc;
    let d2 = beta - disc;
    let denom = if d1.norm() >= d2.norm() { d1 } else { d2 };
    if denom.norm() < S::of(1e-300) {
        return Err(Error::DegenerateGeometry(
            "vanishing discriminant in the chart inverse".into(),
        ));
    }
    Ok(-gamma * S::of(2.0) / denom)
}

/// Reject charts whose linear part is ill conditioned (1-norm estimate).
fn check_linear_conditioning<S: Scalar>(linear: &[Vec<Complex<S>>]) -> Result<()> {
    let m = linear.len();
    let mut max_entry = S::zero();
    let mut min_diag = S::infinity();
    for (i, row) in linear.iter().enumerate() {
        for c in row {
            max_entry = max_entry.max(c.norm());
        }
        if i >= 1 {
            min_diag = min_diag.min(row[i - 1].norm());
        }
    }
    if m >= 2 && max_entry / min_diag > S::of(1e6) {
        return Err(Error::DegenerateGeometry(format!(
            "chart linear map condition estimate {} exceeds 1e6",
            (max_entry / min_diag).to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}
