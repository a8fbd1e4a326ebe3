//! Spectral projection kernels on the tube boundary: the sharp and
//! tempered partial sums, the smoothed sum
//!
//!   P_{χ,λ}(z,w) = Σ_k χ(λ-|k|) e^{-2τ|k|} φ_k^C(z) conj(φ_k^C(w)),
//!
//! and the spectral localization of the Toeplitz operator Π_τ D_√ρ Π_τ,
//!
//!   Π_{χ,λ}(z,w) = Σ_k χ(λ-μ_k) ê_k(z) conj(ê_k(w)),
//!
//! where ê_k = e^{ik·z}/‖e^{ik·z}‖ is the normalized Hardy basis and μ_k
//! the exact Toeplitz eigenvalue.  Translation invariance of dμ_τ makes
//! both operators diagonal in the Fourier basis, so kernels are evaluated
//! as certified windowed mode sums: modes with eigenvalue further than W
//! from λ contribute less than a computed tail bound, derived from the
//! analytic decay certificates of χ.

use crate::error::{Error, Result};
use crate::models::{BoundaryPoint, FlatModel, TubePoint, REEB_ORIENTATION};
use crate::scalar::Scalar;
use crate::smoothing::SmoothingFunction;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Which spectral kernel a windowed sum evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// Smoothed tempered projection P_{χ,λ}.
    Smoothed,
    /// Toeplitz spectral localization Π_{χ,λ}.
    Toeplitz,
}

impl KernelKind {
    pub fn label(&self) -> &'static str {
        match self {
            KernelKind::Smoothed => "P_chi_lambda",
            KernelKind::Toeplitz => "Pi_chi_lambda",
        }
    }
}

/// Truncation data for a windowed kernel sum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelSumConfig<S> {
    pub lambda: S,
    pub tau: S,
    /// Modes with |eigenvalue - λ| <= window enter the sum.
    pub window: S,
    /// Certified bound on the contribution of all excluded modes.
    pub tail_tol: S,
}

/// Largest certifiable window (limited by the χ evaluation grid).
const MAX_WINDOW: f64 = 380.0;

/// Hardy-mass slack between |k| and μ_k used when translating Toeplitz
/// windows into |k| windows: 0 <= |k| - μ_k <= 1/(4τ) + 1 over the ranges
/// exercised here (the -1/(4τ) Laplace correction plus margin).
fn toeplitz_shift_slack<S: Scalar>(tau: S) -> S {
    S::one() / (S::of(4.0) * tau) + S::one()
}

/// Upper bound on the number of lattice modes with |k| ∈ [r, r+1).
fn shell_count_bound<S: Scalar>(m: usize, r: S) -> Result<S> {
    match m {
        1 => Ok(S::of(4.0)),
        2 => Ok(S::of(16.0) * (r + S::of(2.0))),
        3 => Ok(S::of(35.0) * (r + S::of(2.0)) * (r + S::of(2.0))),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Lower bound on exp(-2τn)·‖e^{ik·z}‖² at |k| = n (the scaled Hardy norm),
/// used to bound single Toeplitz modes on the boundary.
fn scaled_hardy_lower<S: Scalar>(m: usize, tau: S, n: S) -> Result<S> {
    let two_pi = S::of(2.0) * S::PI();
    let measure = tau.powi(m as i32) * two_pi.powi(m as i32);
    let sphere = match m {
        1 => S::one(),
        2 => {
            let x = tau * n;
            if x >= S::one() {
                S::of(0.8) * (S::PI() / x).sqrt()
            } else {
                S::of(0.7)
            }
        }
        3 => {
            let x = tau * n;
            if x <= S::of(1e-8) {
                S::of(4.0) * S::PI() * (S::one() - x)
            } else {
                // exact: 2π (1 - e^{-4τn}) / (2τn)
                S::PI() * (S::one() - (-S::of(4.0) * x).exp()) / x
            }
        }
        other => return Err(Error::UnsupportedDimension(other)),
    };
    Ok(measure * sphere)
}

/// Bound on |χ(λ-eig_k)·(mode weight at boundary points)| summed over every
/// mode with |eig_k - λ| > w.
pub fn tail_bound<S: Scalar>(
    model: &FlatModel,
    chi: &SmoothingFunction<S>,
    lambda: S,
    tau: S,
    kind: KernelKind,
    w: S,
) -> Result<S> {
    let m = model.dim();
    let two_pi = S::of(2.0) * S::PI();
    // |k|-distance corresponding to spectral distance j from λ.
    let slack = match kind {
        KernelKind::Smoothed => S::zero(),
        KernelKind::Toeplitz => toeplitz_shift_slack(tau),
    };
    let mode_bound = |n: S| -> Result<S> {
        match kind {
            // e^{-2τ|k|} |φ_k(z) φ_k(w)| <= (2π)^{-m} on ∂M_τ × ∂M_τ.
            KernelKind::Smoothed => Ok(two_pi.powi(-(m as i32))),
            // |ê_k(z) ê_k(w)| <= e^{2τ|k|}/‖e^{ik·z}‖² = 1/scaledH.
            KernelKind::Toeplitz => Ok(scaled_hardy_lower(m, tau, n)?.recip()),
        }
    };
    let mut j = w.floor().max(S::one());
    let cap = (lambda + S::of(2000.0)).max(S::of(4000.0));
    let mut total = S::zero();
    while j < cap {
        let chi_b = chi.sup_bound(j, j + S::one());
        let n_hi = lambda + j + slack + S::of(2.0);
        let count = shell_count_bound::<S>(m, n_hi)? * S::of(2.0);
        total += chi_b * count * mode_bound(n_hi)?;
        j += S::one();
    }
    // Beyond the explicit sum: count·weight <= K j^p with p <= (m-1) + 1/2,
    // and χ <= C12 j^{-12}, so the remainder is below C12 K cap^{p-11}/(11-p).
    let p = match kind {
        KernelKind::Smoothed => S::of_usize(m - 1),
        KernelKind::Toeplitz => S::of_usize(m - 1) + S::of(0.5),
    };
    let k_const =
        shell_count_bound::<S>(m, S::of(4.0) * cap)? * S::of(2.0) * mode_bound(S::of(4.0) * cap)?
            / cap.powf(p);
    let c12 = chi.certified_decay_constant(12);
    total += c12 * k_const * cap.powf(p - S::of(11.0)) / (S::of(11.0) - p);
    Ok(total)
}

/// Smallest window with certified tail below `tail_tol`, or the smallest
/// certifiable bound when none exists.
pub fn certify_window<S: Scalar>(
    model: &FlatModel,
    chi: &SmoothingFunction<S>,
    lambda: S,
    tau: S,
    kind: KernelKind,
    tail_tol: S,
) -> Result<KernelSumConfig<S>> {
    let mut best = S::infinity();
    let mut w = S::of(4.0);
    while w <= S::of(MAX_WINDOW) {
        let bound = tail_bound(model, chi, lambda, tau, kind, w)?;
        best = best.min(bound);
        if bound <= tail_tol {
            return Ok(KernelSumConfig {
                lambda,
                tau,
                window: w,
                tail_tol: bound,
            });
        }
        w += S::of(2.0);
    }
    Err(Error::UncertifiableTail {
        wanted: tail_tol.to_f64().unwrap_or(f64::NAN),
        smallest: best.to_f64().unwrap_or(f64::NAN),
    })
}

/// A kernel with its mode data flattened for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct PreparedKernel<S> {
    pub kind: KernelKind,
    pub lambda: S,
    pub tau: S,
    pub window: S,
    /// Certified bound on the excluded-mode contribution.
    pub tail_bound: S,
    dim: usize,
    /// Mode frequencies, m entries per mode.
    ks: Vec<S>,
    /// ln of the positive per-mode factor (χ weight and normalization).
    log_c: Vec<S>,
}

impl<S: Scalar> PreparedKernel<S> {
    /// Assemble the windowed mode sum for the given configuration.
    pub fn prepare(
        model: &FlatModel,
        chi: &SmoothingFunction<S>,
        cfg: &KernelSumConfig<S>,
        kind: KernelKind,
    ) -> Result<Self> {
        let m = model.dim();
        let lambda = cfg.lambda;
        let tau = cfg.tau;
        let w = cfg.window;
        if w > S::of(MAX_WINDOW) {
            return Err(Error::UncertifiableTail {
                wanted: cfg.tail_tol.to_f64().unwrap_or(f64::NAN),
                smallest: f64::NAN,
            });
        }
        let slack = match kind {
            KernelKind::Smoothed => S::zero(),
            KernelKind::Toeplitz => toeplitz_shift_slack(tau),
        };
        let n_lo = (lambda - w).max(S::zero());
        let n_hi = lambda + w + slack;
        let modes =
            model.enumerate_shell(n_lo.to_f64().unwrap_or(0.0), n_hi.to_f64().unwrap_or(0.0));

        // Toeplitz spectral data varies smoothly in n = |k|; interpolate it
        // on Chebyshev nodes and verify against direct quadrature.
        let spectral = match kind {
            KernelKind::Smoothed => None,
            KernelKind::Toeplitz => {
                if m == 1 {
                    None // exact aligned-component eigenvalues below
                } else {
                    Some(ToeplitzTable::build(model, tau, n_lo, n_hi + S::one())?)
                }
            }
        };

        let two_pi = S::of(2.0) * S::PI();
        let log_norm_smoothed = -S::of_usize(m) * two_pi.ln();
        let mut ks = Vec::with_capacity(modes.len() * m);
        let mut log_c = Vec::with_capacity(modes.len());
        for mode in &modes {
            let n = mode.eigenvalue::<S>();
            let (mu, log_weight) = match kind {
                KernelKind::Smoothed => (n, -S::of(2.0) * tau * n + log_norm_smoothed),
                KernelKind::Toeplitz => match &spectral {
                    Some(table) => {
                        let (mu, ln_scaled_h) = table.eval(n);
                        (mu, -S::of(2.0) * tau * n - ln_scaled_h)
                    }
                    None => {
                        let mu = model.toeplitz_eigenvalue(mode, tau, REEB_ORIENTATION)?;
                        let sh = model.hardy_norm_sq_scaled(n, tau)?;
                        (mu, -S::of(2.0) * tau * n - sh.ln())
                    }
                },
            };
            if (mu - lambda).abs() > w {
                continue;
            }
            let chi_val = chi.eval(lambda - mu);
            if !(chi_val > S::zero()) {
                continue;
            }
            for &kj in &mode.k {
                ks.push(S::of(kj as f64));
            }
            log_c.push(chi_val.ln() + log_weight);
        }

        let tail = tail_bound(model, chi, lambda, tau, kind, w)?;
        Ok(Self {
            kind,
            lambda,
            tau,
            window: w,
            tail_bound: tail,
            dim: m,
            ks,
            log_c,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.log_c.len()
    }

    /// Kernel value K(a, b) = Σ_k c_k e^{ik·(a - b̄)}.
    pub fn eval(&self, a: &BoundaryPoint<S>, b: &BoundaryPoint<S>) -> Complex<S> {
        let m = self.dim;
        debug_assert_eq!(a.dim(), m);
        debug_assert_eq!(b.dim(), m);
        let mut dx = [S::zero(); 8];
        let mut sy = [S::zero(); 8];
        for j in 0..m {
            dx[j] = a.x[j] - b.x[j];
            sy[j] = a.y[j] + b.y[j];
        }
        let mut acc = Complex::new(S::zero(), S::zero());
        for (i, &lc) in self.log_c.iter().enumerate() {
            let base = i * m;
            let mut re = lc;
            let mut im = S::zero();
            for j in 0..m {
                let k = self.ks[base + j];
                re -= k * sy[j];
                im += k * dx[j];
            }
            acc = acc + Complex::new(re, im).exp();
        }
        acc
    }

    /// Diagonal value K(a, a), a positive real number.
    pub fn diagonal(&self, a: &BoundaryPoint<S>) -> S {
        let v = self.eval(a, a);
        debug_assert!(v.im.abs() <= S::of(1e-12) * (S::one() + v.re.abs()));
        v.re
    }
}

/// Piecewise Chebyshev–Lobatto interpolation of (μ(n), ln scaledHardy(n))
/// over a window of |k| values, verified against direct quadrature.
#[derive(Debug, Clone)]
struct ToeplitzTable<S> {
    lo: S,
    seg_width: S,
    segments: Vec<ChebSegment<S>>,
}

#[derive(Debug, Clone)]
struct ChebSegment<S> {
    lo: S,
    hi: S,
    mu: Vec<S>,
    ln_h: Vec<S>,
}

impl<S: Scalar> ToeplitzTable<S> {
    const NODES: usize = 33;
    const SEG_WIDTH: f64 = 16.0;

    fn build(model: &FlatModel, tau: S, lo: S, hi: S) -> Result<Self> {
        let seg_width = S::of(Self::SEG_WIDTH);
        let count = ((hi - lo) / seg_width)
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        let mut segments = Vec::with_capacity(count);
        for i in 0..count {
            let a = lo + seg_width * S::of_usize(i);
            let b = (a + seg_width).min(hi.max(a + seg_width));
            let mut mu = Vec::with_capacity(Self::NODES);
            let mut ln_h = Vec::with_capacity(Self::NODES);
            for j in 0..Self::NODES {
                let x = (S::PI() * S::of_usize(j) / S::of_usize(Self::NODES - 1)).cos();
                let n = (a + b + (b - a) * x) * S::of(0.5);
                mu.push(model.toeplitz_eigenvalue_at(n, tau, REEB_ORIENTATION)?);
                ln_h.push(model.hardy_norm_sq_scaled(n, tau)?.ln());
            }
            segments.push(ChebSegment {
                lo: a,
                hi: b,
                mu,
                ln_h,
            });
        }
        let table = Self {
            lo,
            seg_width,
            segments,
        };
        // Verify the interpolant at interior probe points.
        for frac in [0.213f64, 0.52, 0.871] {
            let n = lo + (hi - lo) * S::of(frac);
            let (mi, hi_v) = table.eval(n);
            let md = model.toeplitz_eigenvalue_at(n, tau, REEB_ORIENTATION)?;
            let hd = model.hardy_norm_sq_scaled(n, tau)?.ln();
            if (mi - md).abs() > S::of(1e-8) * (S::one() + md.abs())
                || (hi_v - hd).abs() > S::of(1e-8) * (S::one() + hd.abs())
            {
                return Err(Error::QuadratureAccuracy {
                    achieved: (mi - md).abs().to_f64().unwrap_or(f64::NAN),
                    wanted: 1e-8,
                });
            }
        }
        Ok(table)
    }

    fn eval(&self, n: S) -> (S, S) {
        let idx = ((n - self.lo) / self.seg_width)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        let count = seg.mu.len();
        let x = ((n * S::of(2.0)) - seg.lo - seg.hi) / (seg.hi - seg.lo);
        let mut num_mu = S::zero();
        let mut num_h = S::zero();
        let mut den = S::zero();
        for j in 0..count {
            let xj = (S::PI() * S::of_usize(j) / S::of_usize(count - 1)).cos();
            let d = x - xj;
            if d.abs() < S::of(1e-14) {
                return (seg.mu[j], seg.ln_h[j]);
            }
            let mut wj = if j % 2 == 0 { S::one() } else { -S::one() };
            if j == 0 || j == count - 1 {
                wj = wj * S::of(0.5);
            }
            let r = wj / d;
            num_mu += r * seg.mu[j];
            num_h += r * seg.ln_h[j];
            den += r;
        }
        (num_mu / den, num_h / den)
    }
}

/// Sharp spectral projection E_λ(x, y) on the real manifold (diagnostic).
pub fn real_projection_elambda<S: Scalar>(
    model: &FlatModel,
    lambda: S,
    x: &[S],
    y: &[S],
) -> Result<S> {
    if lambda < S::zero() {
        return Err(Error::ScaleDomain(
            "sharp projections need lambda >= 0".into(),
        ));
    }
    let zx = TubePoint::new(x.iter().map(|&v| Complex::new(v, S::zero())).collect());
    let zy = TubePoint::new(y.iter().map(|&v| Complex::new(v, S::zero())).collect());
    let mut acc = Complex::new(S::zero(), S::zero());
    for mode in model.enumerate_modes(lambda.to_f64().unwrap_or(0.0)) {
        acc = acc
            + model.complexified_eigenfunction(&mode, &zx)
                * model.complexified_eigenfunction(&mode, &zy).conj();
    }
    debug_assert!(acc.im.abs() <= S::of(1e-12) * (S::one() + acc.re.abs()));
    Ok(acc.re)
}

/// Tempered projection P_λ(z, w) = Σ_{|k|<=λ} e^{-2τ|k|} φ_k(z) conj(φ_k(w)).
pub fn tempered_projection<S: Scalar>(
    model: &FlatModel,
    lambda: S,
    tau: S,
    z: &BoundaryPoint<S>,
    w: &BoundaryPoint<S>,
) -> Result<Complex<S>> {
    if tau <= S::zero() {
        return Err(Error::NonPositiveRadius(tau.to_f64().unwrap_or(f64::NAN)));
    }
    let zt = z.to_tube();
    let wt = w.to_tube();
    let mut acc = Complex::new(S::zero(), S::zero());
    for mode in model.enumerate_modes(lambda.to_f64().unwrap_or(0.0)) {
        let damp = (-S::of(2.0) * tau * mode.eigenvalue::<S>()).exp();
        acc = acc
            + model.complexified_eigenfunction(&mode, &zt)
                * model.complexified_eigenfunction(&mode, &wt).conj()
                * damp;
    }
    Ok(acc)
}

/// Smoothed tempered projection with its certified tail bound.
pub fn smoothed_projection<S: Scalar>(
    model: &FlatModel,
    chi: &SmoothingFunction<S>,
    cfg: &KernelSumConfig<S>,
    z: &BoundaryPoint<S>,
    w: &BoundaryPoint<S>,
) -> Result<(Complex<S>, S)> {
    let prepared = PreparedKernel::prepare(model, chi, cfg, KernelKind::Smoothed)?;
    Ok((prepared.eval(z, w), prepared.tail_bound))
}

/// Toeplitz spectral localization kernel with its certified tail bound.
pub fn toeplitz_localization<S: Scalar>(
    model: &FlatModel,
    chi: &SmoothingFunction<S>,
    cfg: &KernelSumConfig<S>,
    z: &BoundaryPoint<S>,
    w: &BoundaryPoint<S>,
) -> Result<(Complex<S>, S)> {
    let prepared = PreparedKernel::prepare(model, chi, cfg, KernelKind::Toeplitz)?;
    Ok((prepared.eval(z, w), prepared.tail_bound))
}
