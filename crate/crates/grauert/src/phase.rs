//! The reduced stationary-phase data of the scaling computation: the phase
//!
//!   Ψ(t, σ₁, σ₂, Re w₀) = -t - (σ₂/2)·Re w₀ + (σ₁/2)(Re w₀ + 2τt),
//!
//! its critical point (0, 1/τ, 1/τ, 0), Hessian, inverse, determinant τ²/4
//! and signature 0, the second-order operator L = ⟨(Ψ'')⁻¹D, D⟩, the
//! model Gaussian integral over C^{m-1}, and a generic numeric oscillatory
//! integral oracle for cross-checking leading-order predictions.

use crate::error::{Error, Result};
use crate::quad::{gauss_hermite, GlRule};
use crate::scalar::Scalar;
use num_complex::Complex;
use serde::Serialize;

/// A point in the reduced phase variables (t, σ₁, σ₂, Re w₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedPhasePoint<S> {
    pub t: S,
    pub sigma1: S,
    pub sigma2: S,
    pub w0_re: S,
}

impl<S: Scalar> ReducedPhasePoint<S> {
    pub fn new(t: S, sigma1: S, sigma2: S, w0_re: S) -> Self {
        Self {
            t,
            sigma1,
            sigma2,
            w0_re,
        }
    }

    pub fn coords(&self) -> [S; 4] {
        [self.t, self.sigma1, self.sigma2, self.w0_re]
    }
}

/// Ψ(t, σ₁, σ₂, Re w₀) = -t - (σ₂/2) Re w₀ + (σ₁/2)(Re w₀ + 2τt).
pub fn reduced_phase<S: Scalar>(p: &ReducedPhasePoint<S>, tau: S) -> S {
    -p.t - S::of(0.5) * p.sigma2 * p.w0_re
        + S::of(0.5) * p.sigma1 * (p.w0_re + S::of(2.0) * tau * p.t)
}

/// Analytic gradient of the reduced phase in (t, σ₁, σ₂, Re w₀).
pub fn reduced_phase_gradient<S: Scalar>(p: &ReducedPhasePoint<S>, tau: S) -> [S; 4] {
    [
        -S::one() + tau * p.sigma1,
        S::of(0.5) * (p.w0_re + S::of(2.0) * tau * p.t),
        -S::of(0.5) * p.w0_re,
        S::of(0.5) * (p.sigma1 - p.sigma2),
    ]
}

/// Critical-point data of the reduced phase.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport<S> {
    pub tau: S,
    /// (t, σ₁, σ₂, Re w₀) with vanishing gradient.
    pub critical_point: [S; 4],
    pub gradient_norm: S,
    pub hessian: [[S; 4]; 4],
    pub hessian_inverse: [[S; 4]; 4],
    pub determinant: S,
    /// Number of positive minus number of negative eigenvalues.
    pub signature: i32,
    /// γ·λτ, which the formula fixes at 8π² independent of λ and τ.
    pub gamma_lambda_tau: S,
    /// Sup-norm of Hessian·inverse - identity.
    pub inverse_residual: S,
}

impl<S: Scalar> PhaseReport<S> {
    /// Leading stationary-phase coefficient γ(λ) = 8π²/(λτ).
    pub fn gamma(&self, lambda: S) -> S {
        self.gamma_lambda_tau / (lambda * self.tau)
    }
}

/// Compute the critical point by Newton iteration on the gradient and
/// assemble the Hessian data (finite differences are exact here since the
/// phase is an affine-quadratic polynomial).
pub fn phase_critical_data<S: Scalar>(tau: S) -> Result<PhaseReport<S>> {
    if tau <= S::zero() {
        return Err(Error::NonPositiveRadius(tau.to_f64().unwrap_or(f64::NAN)));
    }
    let phase = |x: &[S; 4]| reduced_phase(&ReducedPhasePoint::new(x[0], x[1], x[2], x[3]), tau);

    // Hessian by central second differences (exact for quadratics).
    let h = S::of(0.25);
    let mut hess = [[S::zero(); 4]; 4];
    let base = [S::of(0.3), S::one() / tau, S::one() / tau, S::of(-0.2)];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = S::zero();
            for (si, sj) in [(h, h), (h, -h), (-h, h), (-h, -h)] {
                let mut x = base;
                x[i] += si;
                x[j] += sj;
                let sign = if si * sj > S::zero() {
                    S::one()
                } else {
                    -S::one()
                };
                acc += sign * phase(&x);
            }
            hess[i][j] = acc / (S::of(4.0) * h * h);
        }
    }

    // Newton from an interior start; the gradient is affine so one solve
    // lands on the critical set, a second polishes rounding.
    let mut x = base;
    for _ in 0..3 {
        let g = reduced_phase_gradient(&ReducedPhasePoint::new(x[0], x[1], x[2], x[3]), tau);
        let step = solve4(&hess, &g)?;
        for i in 0..4 {
            x[i] -= step[i];
        }
    }
    let grad = reduced_phase_gradient(&ReducedPhasePoint::new(x[0], x[1], x[2], x[3]), tau);
    let gnorm = grad.iter().map(|&v| v * v).sum::<S>().sqrt();

    let inverse = invert4(&hess)?;
    let det = det4(&hess);
    let eigs = jacobi_eigenvalues(&hess);
    let mut signature = 0i32;
    for &e in &eigs {
        if e > S::of(1e-10) {
            signature += 1;
        } else if e < -S::of(1e-10) {
            signature -= 1;
        } else {
            return Err(Error::DegenerateGeometry(
                "reduced-phase Hessian has a near-zero eigenvalue".into(),
            ));
        }
    }

    let mut residual = S::zero();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = S::zero();
            for k in 0..4 {
                s += hess[i][k] * inverse[k][j];
            }
            let target = if i == j { S::one() } else { S::zero() };
            residual = residual.max((s - target).abs());
        }
    }

    // γ = e^{iωΨ(C)} (det(ω Ψ''/2πi))^{-1/2} at ω = √λ reduces, for
    // signature zero and Ψ(C) = 0, to (2π)²/(λ |det|^{1/2}) = 8π²/(λτ).
    let phase_at_c = phase(&x);
    if phase_at_c.abs() > S::of(1e-12) {
        return Err(Error::DegenerateGeometry(format!(
            "phase does not vanish on the critical set: {phase_at_c}"
        )));
    }
    if signature != 0 {
        return Err(Error::DegenerateGeometry(format!(
            "unexpected Hessian signature {signature}"
        )));
    }
    let gamma_lambda_tau = S::of(4.0) * S::PI() * S::PI() / det.abs().sqrt() * tau;

    Ok(PhaseReport {
        tau,
        critical_point: x,
        gradient_norm: gnorm,
        hessian: hess,
        hessian_inverse: inverse,
        determinant: det,
        signature,
        gamma_lambda_tau,
        inverse_residual: residual,
    })
}

/// L f = (2/τ) f_{σ₁ t} + (2/τ) f_{σ₂ t} - 4 f_{σ₂ w₀}, the operator
/// ⟨(Ψ'')⁻¹ D, D⟩ of the stationary-phase expansion, by Richardson-refined
/// central differences at the given point.
pub fn apply_l_operator<S: Scalar>(
    f: &dyn Fn(&ReducedPhasePoint<S>) -> S,
    tau: S,
    at: &ReducedPhasePoint<S>,
) -> S {
    let h = S::of(1e-4);
    let cross = |i: usize, j: usize, step: S| {
        let mut acc = S::zero();
        for (si, sj) in [(step, step), (step, -step), (-step, step), (-step, -step)] {
            let mut x = at.coords();
            x[i] += si;
            x[j] += sj;
            let sign = if si * sj > S::zero() {
                S::one()
            } else {
                -S::one()
            };
            acc += sign * f(&ReducedPhasePoint::new(x[0], x[1], x[2], x[3]));
        }
        acc / (S::of(4.0) * step * step)
    };
    // Richardson: (4 I_{h/2} - I_h)/3 cancels the h² term.
    let refined = |i: usize, j: usize| {
        (S::of(4.0) * cross(i, j, h * S::of(0.5)) - cross(i, j, h)) / S::of(3.0)
    };
    // variable order: (t, σ₁, σ₂, w₀)
    let f_s1_t = refined(1, 0);
    let f_s2_t = refined(2, 0);
    let f_s2_w0 = refined(2, 3);
    S::of(2.0) / tau * (f_s1_t + f_s2_t) - S::of(4.0) * f_s2_w0
}

/// Minimum gradient norm of the reduced phase over the scan box, excluding
/// the explicit neighborhood of the critical point on which the gradient
/// lower bound degenerates (mirroring the cutoff-support argument
/// (σ₁/2 - σ₂/2)² + (τσ₁ - 1)² >= 1/4 away from σ = 1/τ).
pub fn gradient_scan_min<S: Scalar>(tau: S, steps: usize) -> S {
    let t_range = (-S::one(), S::one());
    let s_range = (S::of(0.5) / tau, S::of(2.0) / tau);
    let w_range = (-S::one(), S::one());
    let lerp = |r: (S, S), i: usize| r.0 + (r.1 - r.0) * S::of_usize(i) / S::of_usize(steps);
    let mut min = S::infinity();
    for it in 0..=steps {
        let t = lerp(t_range, it);
        for is1 in 0..=steps {
            let s1 = lerp(s_range, is1);
            for is2 in 0..=steps {
                let s2 = lerp(s_range, is2);
                for iw in 0..=steps {
                    let w0 = lerp(w_range, iw);
                    let excluded = (tau * s1 - S::one()).abs() <= S::of(0.12)
                        && (s1 - s2).abs() * tau <= S::of(0.24)
                        && w0.abs() <= S::of(0.24)
                        && (w0 + S::of(2.0) * tau * t).abs() <= S::of(0.24);
                    if excluded {
                        continue;
                    }
                    let g = reduced_phase_gradient(&ReducedPhasePoint::new(t, s1, s2, w0), tau);
                    let n = g.iter().map(|&v| v * v).sum::<S>().sqrt();
                    if n < min {
                        min = n;
                    }
                }
            }
        }
    }
    min
}

/// Quadrature of ∫_{C^{m-1}} e^{(1/τ)(-|z|² + z·c)} dz on a Gauss–Hermite
/// tensor grid (nodes within radius ~9√τ); equals (τπ)^{m-1} for every c.
pub fn gaussian_integral_check<S: Scalar>(
    m: usize,
    tau: S,
    c: &[Complex<S>],
) -> Result<Complex<S>> {
    if m < 1 {
        return Err(Error::UnsupportedDimension(m));
    }
    if tau <= S::zero() {
        return Err(Error::NonPositiveRadius(tau.to_f64().unwrap_or(f64::NAN)));
    }
    if c.len() != m - 1 {
        return Err(Error::DimensionMismatch {
            expected: m - 1,
            got: c.len(),
        });
    }
    let value = gaussian_tensor_quadrature(tau, c, 40)?;
    let refined = gaussian_tensor_quadrature(tau, c, 48)?;
    let scale = refined.norm().max(S::of(1e-300));
    if (value - refined).norm() > S::of(1e-8) * scale {
        return Err(Error::QuadratureAccuracy {
            achieved: ((value - refined).norm() / scale)
                .to_f64()
                .unwrap_or(f64::NAN),
            wanted: 1e-8,
        });
    }
    Ok(refined)
}

fn gaussian_tensor_quadrature<S: Scalar>(
    tau: S,
    c: &[Complex<S>],
    nodes: usize,
) -> Result<Complex<S>> {
    let (xs, ws) = gauss_hermite::<S>(nodes);
    let sq = tau.sqrt();
    let mut total = Complex::new(S::one(), S::zero());
    // The integrand factorizes over complex coordinates; each factor is a
    // full 2D tensor sum over (Re z_j, Im z_j) = √τ (u, v).
    for &cj in c {
        let mut acc = Complex::new(S::zero(), S::zero());
        for (&u, &wu) in xs.iter().zip(ws.iter()) {
            for (&v, &wv) in xs.iter().zip(ws.iter()) {
                let z_over_tau = Complex::new(u, v) / sq;
                let f = (z_over_tau * cj).exp();
                acc = acc + f * (wu * wv);
            }
        }
        total = total * acc * tau;
    }
    Ok(total)
}

/// Comparison of a numeric oscillatory integral against its leading-order
/// stationary-phase prediction.
#[derive(Debug, Clone, Serialize)]
pub struct OscillatoryCheck<S> {
    pub quadrature: Complex<S>,
    pub prediction: Complex<S>,
    pub rel_deviation: S,
    pub critical_point: Vec<S>,
}

/// Quadrature of ∫ e^{iλΦ(x)} a(x) dx over a box, compared against
/// a(C) e^{iλΦ(C)} (2π/λ)^{d/2} |det Φ''(C)|^{-1/2} e^{iπ·sgn/4}.
///
/// The phase must have a single nondegenerate interior critical point and
/// the amplitude should vanish smoothly at the box boundary.
pub fn oscillatory_oracle<S: Scalar>(
    phase: &dyn Fn(&[S]) -> S,
    amplitude: &dyn Fn(&[S]) -> S,
    lambda: S,
    domain: &[(S, S)],
) -> Result<OscillatoryCheck<S>> {
    let d = domain.len();
    if d == 0 || d > 4 {
        return Err(Error::UnsupportedDimension(d));
    }
    if lambda < S::of(20.0) {
        return Err(Error::ScaleDomain(
            "oscillatory oracle needs lambda >= 20".into(),
        ));
    }
    let critical = locate_critical_point(phase, domain)?;
    let hess = fd_hessian(phase, &critical);
    let det = det_dyn(&hess);
    if det.abs() < S::of(1e-8) {
        return Err(Error::UnsupportedPhase("degenerate critical point".into()));
    }
    let eigs = jacobi_eigenvalues_dyn(&hess);
    let mut sgn = 0i32;
    for &e in &eigs {
        sgn += if e > S::zero() { 1 } else { -1 };
    }

    let quadrature = oscillatory_quadrature(phase, amplitude, lambda, domain);

    let amp_c = amplitude(&critical);
    let phase_c = phase(&critical);
    let pref = (S::of(2.0) * S::PI() / lambda).powf(S::of_usize(d) * S::of(0.5)) / det.abs().sqrt();
    let rotation = Complex::from_polar(
        S::one(),
        lambda * phase_c + S::PI() * S::of(sgn as f64) / S::of(4.0),
    );
    let prediction = rotation * pref * amp_c;
    let rel = (quadrature - prediction).norm() / prediction.norm().max(S::of(1e-300));
    Ok(OscillatoryCheck {
        quadrature,
        prediction,
        rel_deviation: rel,
        critical_point: critical,
    })
}

fn oscillatory_quadrature<S: Scalar>(
    phase: &dyn Fn(&[S]) -> S,
    amplitude: &dyn Fn(&[S]) -> S,
    lambda: S,
    domain: &[(S, S)],
) -> Complex<S> {
    let d = domain.len();
    // Per-axis oscillation budgets ω_j = λ · max|∂_jΦ| · halfwidth_j from a
    // coarse probe lattice.
    let mut grad_axis = vec![S::of(1e-3); d];
    let probes = 6usize.pow(d as u32);
    for p in 0..probes {
        let mut x = vec![S::zero(); d];
        let mut q = p;
        for j in 0..d {
            let i = q % 6;
            q /= 6;
            x[j] = domain[j].0 + (domain[j].1 - domain[j].0) * S::of_usize(i) / S::of(5.0);
        }
        let g = fd_gradient(phase, &x);
        for j in 0..d {
            grad_axis[j] = grad_axis[j].max(g[j].abs());
        }
    }
    if d == 1 {
        // Composite panels with a fixed small rule resolve arbitrarily many
        // cycles in one dimension.
        let rule = GlRule::<S>::new(24);
        let width = domain[0].1 - domain[0].0;
        let cycles = lambda * grad_axis[0] * width / (S::of(2.0) * S::PI());
        let panels = (cycles / S::of(2.0))
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .clamp(4, 1_000_000);
        let step = width / S::of_usize(panels);
        let mut acc = Complex::new(S::zero(), S::zero());
        for i in 0..panels {
            let lo = domain[0].0 + step * S::of_usize(i);
            let half = step * S::of(0.5);
            for (xn, wn) in rule.nodes.iter().zip(rule.weights.iter()) {
                let x = [lo + half * (*xn + S::one())];
                let a = amplitude(&x);
                if a != S::zero() {
                    acc = acc + Complex::from_polar(a * *wn * half, lambda * phase(&x));
                }
            }
        }
        return acc;
    }
    // One tensor Gauss–Legendre grid, order per axis tied to its budget.
    let mut rules: Vec<GlRule<S>> = Vec::with_capacity(d);
    let mut total = 1usize;
    for j in 0..d {
        let half = (domain[j].1 - domain[j].0) * S::of(0.5);
        let omega = lambda * grad_axis[j] * half;
        let n = (S::of(0.62) * omega + S::of(18.0))
            .ceil()
            .to_usize()
            .unwrap_or(24)
            .clamp(24, 128);
        total = total.saturating_mul(n);
        rules.push(GlRule::new(n));
    }
    debug_assert!(total <= 400_000_000, "oscillatory grid of {total} points");
    let mut acc = Complex::new(S::zero(), S::zero());
    let mut idx = vec![0usize; d];
    let mut x = vec![S::zero(); d];
    'outer: loop {
        let mut w = S::one();
        for j in 0..d {
            let half = (domain[j].1 - domain[j].0) * S::of(0.5);
            let mid = (domain[j].1 + domain[j].0) * S::of(0.5);
            x[j] = mid + half * rules[j].nodes[idx[j]];
            w *= rules[j].weights[idx[j]] * half;
        }
        let a = amplitude(&x);
        if a != S::zero() {
            acc = acc + Complex::from_polar(a * w, lambda * phase(&x));
        }
        // odometer increment
        for j in 0..d {
            idx[j] += 1;
            if idx[j] < rules[j].nodes.len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    acc
}

fn locate_critical_point<S: Scalar>(
    phase: &dyn Fn(&[S]) -> S,
    domain: &[(S, S)],
) -> Result<Vec<S>> {
    let d = domain.len();
    let steps = match d {
        1 => 400,
        2 => 60,
        _ => 18,
    };
    // Coarse scan for candidate cells with small gradient norm.
    let mut best: Vec<(S, Vec<S>)> = Vec::new();
    let cells = (steps + 1usize).pow(d as u32);
    for c in 0..cells {
        let mut q = c;
        let mut x = vec![S::zero(); d];
        for j in 0..d {
            let i = q % (steps + 1);
            q /= steps + 1;
            x[j] = domain[j].0 + (domain[j].1 - domain[j].0) * S::of_usize(i) / S::of_usize(steps);
        }
        let g = fd_gradient(phase, &x);
        let n = g.iter().map(|&v| v * v).sum::<S>().sqrt();
        best.push((n, x));
    }
    best.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Newton-refine the best candidate.
    let mut x = best[0].1.clone();
    for _ in 0..60 {
        let g = fd_gradient(phase, &x);
        let gn = g.iter().map(|&v| v * v).sum::<S>().sqrt();
        if gn < S::of(1e-12) {
            break;
        }
        let h = fd_hessian(phase, &x);
        let step = solve_dyn(&h, &g)?;
        for j in 0..x.len() {
            x[j] -= step[j];
        }
    }
    for j in 0..d {
        if x[j] < domain[j].0 || x[j] > domain[j].1 {
            return Err(Error::UnsupportedPhase(
                "critical point escaped the domain".into(),
            ));
        }
    }

    // Reject a second separated critical candidate: any coarse point with a
    // small gradient far from the refined critical point.
    let diam: S = domain
        .iter()
        .map(|&(a, b)| (b - a) * (b - a))
        .sum::<S>()
        .sqrt();
    for (n, y) in &best {
        if *n > S::of(0.05) {
            break;
        }
        let dist: S = y
            .iter()
            .zip(&x)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<S>()
            .sqrt();
        if dist > S::of(0.05) * diam {
            // Newton-refine the distant candidate; a second converged
            // critical point inside the domain disqualifies the phase.
            let mut y2 = y.clone();
            let mut converged = false;
            for _ in 0..40 {
                let g = fd_gradient(phase, &y2);
                let gn = g.iter().map(|&v| v * v).sum::<S>().sqrt();
                if gn < S::of(1e-10) {
                    converged = true;
                    break;
                }
                let h = fd_hessian(phase, &y2);
                match solve_dyn(&h, &g) {
                    Ok(step) => {
                        for j in 0..y2.len() {
                            y2[j] -= step[j];
                        }
                    }
                    Err(_) => break,
                }
            }
            let inside = y2.iter().zip(domain).all(|(&v, &(a, b))| v >= a && v <= b);
            let dist2: S = y2
                .iter()
                .zip(&x)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<S>()
                .sqrt();
            if converged && inside && dist2 > S::of(0.05) * diam {
                return Err(Error::UnsupportedPhase(
                    "multiple critical points detected".into(),
                ));
            }
        }
    }
    Ok(x)
}

fn fd_gradient<S: Scalar>(f: &dyn Fn(&[S]) -> S, x: &[S]) -> Vec<S> {
    let h = S::of(1e-5);
    (0..x.len())
        .map(|j| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            (f(&xp) - f(&xm)) / (S::of(2.0) * h)
        })
        .collect()
}

fn fd_hessian<S: Scalar>(f: &dyn Fn(&[S]) -> S, x: &[S]) -> Vec<Vec<S>> {
    let d = x.len();
    let h = S::of(1e-4);
    let mut out = vec![vec![S::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = S::zero();
            for (si, sj) in [(h, h), (h, -h), (-h, h), (-h, -h)] {
                let mut y = x.to_vec();
                y[i] += si;
                y[j] += sj;
                let sign = if si * sj > S::zero() {
                    S::one()
                } else {
                    -S::one()
                };
                acc += sign * f(&y);
            }
            out[i][j] = acc / (S::of(4.0) * h * h);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// small dense linear algebra (fixed 4x4 and dynamic d <= 4)

fn solve4<S: Scalar>(a: &[[S; 4]; 4], b: &[S; 4]) -> Result<[S; 4]> {
    let av: Vec<Vec<S>> = a.iter().map(|r| r.to_vec()).collect();
    let x = solve_dyn(&av, b)?;
    Ok([x[0], x[1], x[2], x[3]])
}

fn solve_dyn<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = b.len();
    let mut m: Vec<Vec<S>> = a.iter().map(|r| r.to_vec()).collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < S::of(1e-300) {
            return Err(Error::DegenerateGeometry("singular linear system".into()));
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        let d = m[col][col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col] / d;
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    Ok((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

fn invert4<S: Scalar>(a: &[[S; 4]; 4]) -> Result<[[S; 4]; 4]> {
    let mut out = [[S::zero(); 4]; 4];
    for col in 0..4 {
        let mut e = [S::zero(); 4];
        e[col] = S::one();
        let x = solve4(a, &e)?;
        for row in 0..4 {
            out[row][col] = x[row];
        }
    }
    Ok(out)
}

fn det4<S: Scalar>(a: &[[S; 4]; 4]) -> S {
    let av: Vec<Vec<S>> = a.iter().map(|r| r.to_vec()).collect();
    det_dyn(&av)
}

fn det_dyn<S: Scalar>(a: &[Vec<S>]) -> S {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < S::of(1e-300) {
            return S::zero();
        }
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    det
}

fn jacobi_eigenvalues<S: Scalar>(a: &[[S; 4]; 4]) -> Vec<S> {
    let av: Vec<Vec<S>> = a.iter().map(|r| r.to_vec()).collect();
    jacobi_eigenvalues_dyn(&av)
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues_dyn<S: Scalar>(a: &[Vec<S>]) -> Vec<S> {
    let n = a.len();
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = S::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < S::of(1e-28) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < S::of(1e-300) {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (S::of(2.0) * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = (t * t + S::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}
