//! End-to-end verification of the Heisenberg scaling asymptotics: rescale
//! chart coordinates by (θ/λ, u/√λ), compare diagonal-normalized kernels
//!
//!   K(a,b) / sqrt(K(a,a) K(b,b))
//!
//! against the leading model factor, and fit the decay exponent of the sup
//! error over a fixed coordinate grid.  Diagonal normalization removes
//! every constant the asymptotics leaves undetermined (C_{m,M}, measure
//! normalization, χ mass, λ-power prefactors), leaving a pure shape
//! comparison.

use crate::error::{Error, Result};
use crate::fit::{fit_rate, RateFit};
use crate::geometry::{build_heisenberg_chart, HeisenbergChart};
use crate::heisenberg::theorem_leading_factor;
use crate::kernels::{certify_window, KernelKind, KernelSumConfig, PreparedKernel};
use crate::models::{norm, BoundaryPoint, FlatModel};
use crate::scalar::Scalar;
use crate::smoothing::{make_chi, SmoothingFunction};
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

/// One half of a comparison tuple: chart coordinates (θ, u) before scaling.
#[derive(Debug, Clone, Serialize)]
pub struct GridHalf<S> {
    pub angle: S,
    pub w: Vec<Complex<S>>,
}

impl<S: Scalar> GridHalf<S> {
    pub fn size(&self) -> S {
        self.angle.abs() + self.w.iter().map(|c| c.norm()).sum::<S>()
    }
}

/// The compact comparison window {|θ| + |φ| + |u| + |v| <= ρ}, sampled on
/// per-axis lattices with complex entries on the real and imaginary axes.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonGrid<S> {
    pub rho: S,
    pub halves: Vec<GridHalf<S>>,
    /// Index pairs into `halves`; the first pair is the diagonal tuple.
    pub pairs: Vec<(usize, usize)>,
}

impl<S: Scalar> ComparisonGrid<S> {
    /// The default grid: `points_per_axis` values per axis over [-ρ, ρ],
    /// u on the real and imaginary axes of the first transverse slot.
    pub fn standard(m: usize, rho: S, points_per_axis: usize) -> Self {
        assert!(points_per_axis >= 3 && points_per_axis % 2 == 1);
        let mut axis = Vec::with_capacity(points_per_axis);
        for i in 0..points_per_axis {
            let t = S::of_usize(i) / S::of_usize(points_per_axis - 1);
            axis.push(-rho + S::of(2.0) * rho * t);
        }
        let zero_w = vec![Complex::new(S::zero(), S::zero()); m.saturating_sub(1)];
        let mut ws: Vec<Vec<Complex<S>>> = vec![zero_w.clone()];
        if m > 1 {
            for &a in &axis {
                if a == S::zero() {
                    continue;
                }
                let mut re = zero_w.clone();
                re[0] = Complex::new(a, S::zero());
                ws.push(re);
                let mut im = zero_w.clone();
                im[0] = Complex::new(S::zero(), a);
                ws.push(im);
            }
        }
        let mut halves = Vec::new();
        for &angle in &axis {
            for w in &ws {
                let half = GridHalf {
                    angle,
                    w: w.clone(),
                };
                if half.size() <= rho + S::of(1e-12) {
                    halves.push(half);
                }
            }
        }
        // Put the origin first so the diagonal tuple leads the pair list.
        let origin = halves
            .iter()
            .position(|h| h.size() == S::zero())
            .expect("origin is always in range");
        halves.swap(0, origin);
        let mut pairs = vec![(0usize, 0usize)];
        for i in 0..halves.len() {
            for j in 0..halves.len() {
                if i == 0 && j == 0 {
                    continue;
                }
                if halves[i].size() + halves[j].size() <= rho + S::of(1e-12) {
                    pairs.push((i, j));
                }
            }
        }
        Self { rho, halves, pairs }
    }
}

/// Rescaled boundary pair for one grid tuple.
pub fn rescaled_pair<S: Scalar>(
    chart: &HeisenbergChart<S>,
    a: &GridHalf<S>,
    b: &GridHalf<S>,
    lambda: S,
) -> Result<(BoundaryPoint<S>, BoundaryPoint<S>)> {
    Ok((
        chart.rescaled_boundary_point(a.angle, &a.w, lambda)?,
        chart.rescaled_boundary_point(b.angle, &b.w, lambda)?,
    ))
}

/// Normalized kernel values on the grid at one λ, with the λ-independent
/// model factor alongside.
#[derive(Debug, Clone, Serialize)]
pub struct GridEvaluation<S> {
    pub lambda: S,
    pub kind: KernelKind,
    /// Diagonal-normalized kernel per grid pair.
    pub normalized: Vec<Complex<S>>,
    /// Normalized model factor per grid pair.
    pub factor: Vec<Complex<S>>,
    /// Certified tail bound relative to the smallest diagonal used.
    pub tail_rel: S,
    pub window: S,
    pub mode_count: usize,
}

impl<S: Scalar> GridEvaluation<S> {
    /// Sup over the grid of |normalized - factor|.
    pub fn sup_error(&self) -> S {
        self.normalized
            .iter()
            .zip(&self.factor)
            .map(|(n, f)| (n - f).norm())
            .fold(S::zero(), S::max)
    }
}

/// Evaluate one kernel family on the rescaled grid at one λ.
pub fn evaluate_grid<S: Scalar>(
    model: &FlatModel,
    chi: &SmoothingFunction<S>,
    chart: &HeisenbergChart<S>,
    grid: &ComparisonGrid<S>,
    kind: KernelKind,
    lambda: S,
    tail_rel: S,
) -> Result<GridEvaluation<S>> {
    let tau = chart.tau;
    // Two-pass window choice: a small provisional window estimates the
    // diagonal scale, then the certified window meets tail_rel of it.
    let provisional = KernelSumConfig {
        lambda,
        tau,
        window: S::of(14.0),
        tail_tol: S::one(),
    };
    let rough = PreparedKernel::prepare(model, chi, &provisional, kind)?;
    let diag_scale = rough.diagonal(&chart.base);
    if !(diag_scale > S::of(1e-300)) {
        return Err(Error::DegenerateNormalization {
            value: diag_scale.to_f64().unwrap_or(f64::NAN),
        });
    }
    let cfg = certify_window(model, chi, lambda, tau, kind, tail_rel * diag_scale)?;
    let prepared = PreparedKernel::prepare(model, chi, &cfg, kind)?;

    // Boundary points and diagonal values per half-tuple.
    let points: Vec<BoundaryPoint<S>> = grid
        .halves
        .par_iter()
        .map(|h| chart.rescaled_boundary_point(h.angle, &h.w, lambda))
        .collect::<Result<_>>()?;
    let diagonals: Vec<S> = points.par_iter().map(|p| prepared.diagonal(p)).collect();
    let mut min_diag = S::infinity();
    for &d in &diagonals {
        min_diag = min_diag.min(d);
        if !(d > S::of(1e-300)) {
            return Err(Error::DegenerateNormalization {
                value: d.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let normalized: Vec<Complex<S>> = grid
        .pairs
        .par_iter()
        .map(|&(i, j)| {
            let v = prepared.eval(&points[i], &points[j]);
            v / (diagonals[i] * diagonals[j]).sqrt()
        })
        .collect();
    let factor: Vec<Complex<S>> = grid
        .pairs
        .iter()
        .map(|&(i, j)| {
            theorem_leading_factor(
                tau,
                grid.halves[i].angle,
                grid.halves[j].angle,
                &grid.halves[i].w,
                &grid.halves[j].w,
            )
        })
        .collect::<Result<_>>()?;
    Ok(GridEvaluation {
        lambda,
        kind,
        normalized,
        factor,
        tail_rel: prepared.tail_bound / min_diag,
        window: prepared.window,
        mode_count: prepared.mode_count(),
    })
}

/// Sup error of the normalized kernel against the model factor.
pub fn normalized_error<S: Scalar>(
    model: &FlatModel,
    chi: &SmoothingFunction<S>,
    chart: &HeisenbergChart<S>,
    grid: &ComparisonGrid<S>,
    kind: KernelKind,
    lambda: S,
    tail_rel: S,
) -> Result<S> {
    Ok(evaluate_grid(model, chi, chart, grid, kind, lambda, tail_rel)?.sup_error())
}

/// Study configuration; all fields are echoed into the report.
#[derive(Debug, Clone, Serialize)]
pub struct StudyConfig<S> {
    pub dim: usize,
    pub tau: S,
    pub eps: S,
    pub kind: KernelKind,
    pub lambdas: Vec<S>,
    pub rho: S,
    pub points_per_axis: usize,
    pub tail_rel: S,
    /// Base point coordinates (x, y) on ∂M_τ for the Heisenberg chart.
    pub base_x: Vec<S>,
    pub base_y: Vec<S>,
}

impl StudyConfig<f64> {
    /// The default verification study for the given kernel family.
    pub fn default_for(kind: KernelKind) -> Self {
        Self {
            dim: 2,
            tau: 0.5,
            eps: 2.0,
            kind,
            lambdas: vec![50.0, 71.0, 100.0, 141.0, 200.0, 283.0, 400.0],
            rho: 0.8,
            points_per_axis: 5,
            tail_rel: 1e-8,
            base_x: vec![0.0, 0.0],
            base_y: vec![0.3, 0.4],
        }
    }
}

/// Per-λ error row of a scaling report.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorRow<S> {
    pub lambda: S,
    pub sup_error: S,
    pub tail_rel: S,
    pub window: S,
    pub mode_count: usize,
}

/// Full record of a scaling study.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport<S> {
    pub config: StudyConfig<S>,
    pub kernel: &'static str,
    pub rows: Vec<ErrorRow<S>>,
    pub fit: RateFit<S>,
    /// Chart actually used (the comparison is gauge-covariant at leading
    /// order, but the chart is recorded for reproducibility).
    pub chart: HeisenbergChart<S>,
    pub grid_pairs: usize,
}

impl<S: Scalar> ScalingReport<S> {
    /// Errors nonincreasing across the λ grid up to the given jitter
    /// fraction (rows at the tail floor are treated as converged).
    pub fn monotone_up_to(&self, jitter: S) -> bool {
        let floor = S::of(10.0) * self.rows.iter().map(|r| r.tail_rel).fold(S::zero(), S::max);
        let mut prev = S::infinity();
        for row in &self.rows {
            if row.sup_error > prev * (S::one() + jitter) && row.sup_error > floor {
                return false;
            }
            prev = row.sup_error.max(floor);
        }
        true
    }

    /// Plot-ready (log λ, log sup error) columns.
    pub fn log_log_columns(&self) -> Vec<(S, S)> {
        self.rows
            .iter()
            .map(|r| (r.lambda.ln(), r.sup_error.max(S::of(1e-300)).ln()))
            .collect()
    }
}

/// Run a full scaling study: per-λ sup errors plus the fitted exponent.
pub fn run_scaling_study<S: Scalar>(config: &StudyConfig<S>) -> Result<ScalingReport<S>> {
    let model = FlatModel::torus(config.dim);
    let chi = make_chi(config.eps)?;
    let base = BoundaryPoint::new(config.base_x.clone(), config.base_y.clone(), config.tau)?;
    let chart = build_heisenberg_chart(&model, &base, config.tau)?;
    let grid = ComparisonGrid::standard(config.dim, config.rho, config.points_per_axis);
    let mut rows = Vec::with_capacity(config.lambdas.len());
    for &lambda in &config.lambdas {
        let eval = evaluate_grid(
            &model,
            &chi,
            &chart,
            &grid,
            config.kind,
            lambda,
            config.tail_rel,
        )?;
        rows.push(ErrorRow {
            lambda,
            sup_error: eval.sup_error(),
            tail_rel: eval.tail_rel,
            window: eval.window,
            mode_count: eval.mode_count,
        });
    }
    let samples: Vec<(S, S)> = rows.iter().map(|r| (r.lambda, r.sup_error)).collect();
    let floor = rows.iter().map(|r| r.tail_rel).fold(S::zero(), S::max) * S::of(10.0);
    let fit = fit_rate(&samples, floor.max(S::of(1e-14)))?;
    Ok(ScalingReport {
        config: config.clone(),
        kernel: config.kind.label(),
        rows,
        fit,
        chart,
        grid_pairs: grid.pairs.len(),
    })
}

/// Cross-consistency of the two kernel families: sup over the grid of the
/// difference of their normalized kernels, per λ, with a rate fit.
#[derive(Debug, Clone, Serialize)]
pub struct CrossConsistencyReport<S> {
    pub lambdas: Vec<S>,
    pub sup_differences: Vec<S>,
    pub fit: RateFit<S>,
}

pub fn cross_consistency_study<S: Scalar>(
    config: &StudyConfig<S>,
) -> Result<CrossConsistencyReport<S>> {
    let model = FlatModel::torus(config.dim);
    let chi = make_chi(config.eps)?;
    let base = BoundaryPoint::new(config.base_x.clone(), config.base_y.clone(), config.tau)?;
    let chart = build_heisenberg_chart(&model, &base, config.tau)?;
    let grid = ComparisonGrid::standard(config.dim, config.rho, config.points_per_axis);
    let mut sups = Vec::with_capacity(config.lambdas.len());
    for &lambda in &config.lambdas {
        let toeplitz = evaluate_grid(
            &model,
            &chi,
            &chart,
            &grid,
            KernelKind::Toeplitz,
            lambda,
            config.tail_rel,
        )?;
        let smoothed = evaluate_grid(
            &model,
            &chi,
            &chart,
            &grid,
            KernelKind::Smoothed,
            lambda,
            config.tail_rel,
        )?;
        let sup = toeplitz
            .normalized
            .iter()
            .zip(&smoothed.normalized)
            .map(|(a, b)| (a - b).norm())
            .fold(S::zero(), S::max);
        sups.push(sup);
    }
    let samples: Vec<(S, S)> = config
        .lambdas
        .iter()
        .copied()
        .zip(sups.iter().copied())
        .collect();
    let fit = fit_rate(&samples, S::of(1e-12))?;
    Ok(CrossConsistencyReport {
        lambdas: config.lambdas.clone(),
        sup_differences: sups,
        fit,
    })
}

/// Off-diagonal mass ratio at boundary separation λ^{δ-1/2} in a real
/// transverse direction at the chart base point, with the Gaussian model
/// prediction exp(-λ d²/(4τ)) alongside.
#[derive(Debug, Clone, Serialize)]
pub struct LocalizationRow<S> {
    pub lambda: S,
    pub separation: S,
    pub ratio: S,
    pub predicted: S,
}

pub fn localization_diagnostic<S: Scalar>(
    model: &FlatModel,
    chi: &SmoothingFunction<S>,
    chart: &HeisenbergChart<S>,
    lambda: S,
    delta: S,
    tail_rel: S,
) -> Result<LocalizationRow<S>> {
    if model.dim() < 2 {
        // The contact (flow) direction carries no Gaussian factor at this
        // scale; the diagnostic needs a transverse direction.
        return Err(Error::UnsupportedDimension(model.dim()));
    }
    if !(delta > S::zero() && delta < S::of(0.5)) {
        return Err(Error::ScaleDomain(format!(
            "localization exponent must lie in (0, 1/2), got {delta}"
        )));
    }
    let tau = chart.tau;
    let sep = lambda.powf(delta - S::of(0.5));
    // Transverse real unit direction: the rotation row sending e_1.
    let m = model.dim();
    let mut dir = vec![S::zero(); m];
    for j in 0..m {
        dir[j] = chart.rotation[0][j];
    }
    let dn = norm(&dir);
    let base = &chart.base;
    let shifted = BoundaryPoint::new(
        base.x
            .iter()
            .zip(&dir)
            .map(|(&x, &d)| x + sep * d / dn)
            .collect(),
        base.y.clone(),
        tau,
    )?;
    let provisional = KernelSumConfig {
        lambda,
        tau,
        window: S::of(14.0),
        tail_tol: S::one(),
    };
    let kind = KernelKind::Smoothed;
    let rough = PreparedKernel::prepare(model, chi, &provisional, kind)?;
    let scale = rough.diagonal(base);
    let cfg = certify_window(model, chi, lambda, tau, kind, tail_rel * scale)?;
    let prepared = PreparedKernel::prepare(model, chi, &cfg, kind)?;
    let diag = (prepared.diagonal(base) * prepared.diagonal(&shifted)).sqrt();
    let off = prepared.eval(base, &shifted).norm();
    Ok(LocalizationRow {
        lambda,
        separation: sep,
        ratio: off / diag,
        predicted: (-lambda * sep * sep / (S::of(4.0) * tau)).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn grid_shape() {
        let grid = ComparisonGrid::standard(2, 0.8f64, 5);
        assert!(grid.pairs.len() <= 1000, "pairs {}", grid.pairs.len());
        assert!(grid.pairs.len() >= 50);
        assert_eq!(grid.pairs[0], (0, 0));
        assert_eq!(grid.halves[0].size(), 0.0);
        for &(i, j) in &grid.pairs {
            assert!(grid.halves[i].size() + grid.halves[j].size() <= 0.8 + 1e-9);
        }
        // circle grid has no transverse slots
        let g1 = ComparisonGrid::standard(1, 0.8f64, 5);
        assert!(g1.halves.iter().all(|h| h.w.is_empty()));
    }

    #[test]
    fn rescaled_pairs_shrink_to_base_at_sqrt_rate() {
        let model = FlatModel::torus(2);
        let tau = 0.5;
        let base = BoundaryPoint::new(vec![0.1, -0.7], vec![0.3, 0.4], tau).unwrap();
        let chart = build_heisenberg_chart(&model, &base, tau).unwrap();
        let a = GridHalf {
            angle: 0.4,
            w: vec![Complex::new(0.3, -0.2)],
        };
        let b = GridHalf {
            angle: -0.2,
            w: vec![Complex::new(0.0, 0.4)],
        };
        let mut samples = Vec::new();
        for &l in &[50.0f64, 100.0, 200.0, 400.0, 800.0] {
            let (pa, pb) = rescaled_pair(&chart, &a, &b, l).unwrap();
            let da = model.base_distance(&pa.x, &base.x).unwrap();
            let dy: f64 =
                pa.y.iter()
                    .zip(&base.y)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum::<f64>()
                    .sqrt();
            let dist = (da * da + dy * dy).sqrt();
            assert!(dist > 0.0);
            samples.push((l, dist));
            let db = model.base_distance(&pb.x, &base.x).unwrap();
            assert!(db > 0.0 && db < 0.1);
        }
        let fit = fit_rate(&samples, 1e-14).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.05, "slope {}", fit.slope);
    }

    #[test]
    fn theta_only_tuples_drift_along_the_flow() {
        // A θ-only rescaled point matches the Reeb flow at time θ/(2τλ)
        // to O(λ^{-1}) in manifold distance (both are O(λ^{-1/2})-close to
        // the base, their difference one order better).
        let model = FlatModel::torus(2);
        let tau = 0.5;
        let base = BoundaryPoint::new(vec![0.0, 0.0], vec![0.0, tau], tau).unwrap();
        let chart = build_heisenberg_chart(&model, &base, tau).unwrap();
        for &l in &[100.0f64, 400.0] {
            let theta = 0.6;
            let p = chart
                .rescaled_boundary_point(theta, &[Complex::new(0.0, 0.0)], l)
                .unwrap();
            let flowed =
                crate::geometry::reeb_flow(&model, theta / (2.0 * tau * l), &base).unwrap();
            let dx = model.base_distance(&p.x, &flowed.x).unwrap();
            assert!(dx <= 10.0 / l, "lambda={l}: dx={dx}");
        }
    }

    #[test]
    fn diagonal_tuple_has_zero_error() {
        let model = FlatModel::torus(2);
        let tau = 0.5;
        let chi = make_chi(2.0f64).unwrap();
        let base = BoundaryPoint::new(vec![0.2, 0.4], vec![0.3, -0.4], tau).unwrap();
        let chart = build_heisenberg_chart(&model, &base, tau).unwrap();
        let grid = ComparisonGrid {
            rho: 0.8,
            halves: vec![GridHalf {
                angle: 0.0,
                w: vec![Complex::new(0.0, 0.0)],
            }],
            pairs: vec![(0, 0)],
        };
        for kind in [KernelKind::Smoothed, KernelKind::Toeplitz] {
            let eval = evaluate_grid(&model, &chi, &chart, &grid, kind, 60.0, 1e-7).unwrap();
            assert!(
                eval.sup_error() < 1e-12,
                "{kind:?} diagonal error {}",
                eval.sup_error()
            );
        }
    }

    #[test]
    fn circle_phase_converges_to_reeb_character() {
        // m = 1, τ = 0.5: the normalized kernel tends to e^{i(θ-φ)/2τ}.
        let model = FlatModel::circle();
        let tau = 0.5;
        let chi = make_chi(2.0f64).unwrap();
        let base = BoundaryPoint::new(vec![0.3], vec![tau], tau).unwrap();
        let chart = build_heisenberg_chart(&model, &base, tau).unwrap();
        let grid = ComparisonGrid::standard(1, 0.8f64, 5);
        for kind in [KernelKind::Smoothed, KernelKind::Toeplitz] {
            let err = normalized_error(&model, &chi, &chart, &grid, kind, 200.0, 1e-9).unwrap();
            assert!(err < 0.05, "{kind:?}: m=1 error {err}");
        }
    }

    #[test]
    fn torus_errors_decrease_with_lambda() {
        let mut config = StudyConfig::default_for(KernelKind::Smoothed);
        config.lambdas = vec![50.0, 71.0, 100.0, 200.0, 400.0];
        config.tail_rel = 1e-8;
        let report = run_scaling_study(&config).unwrap();
        for w in report.rows.windows(2) {
            assert!(
                w[1].sup_error < w[0].sup_error * 1.1,
                "errors {:?}",
                report.rows.iter().map(|r| r.sup_error).collect::<Vec<_>>()
            );
        }
        assert!(report.rows.last().unwrap().sup_error < 0.05);
        assert!(report.monotone_up_to(0.1));
    }

    #[test]
    fn synthetic_fit_examples() {
        // exact power law and mixed orders, as independent checks of the
        //fitting path used by the studies
        let exact: Vec<(f64, f64)> = [50.0, 71.0, 100.0, 141.0, 200.0]
            .iter()
            .map(|&l: &f64| (l, 3.0 * l.powf(-0.5)))
            .collect();
        let fit = fit_rate(&exact, 1e-14).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-10);
        let mixed: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&l: &f64| (l, l.powf(-0.5) + 0.8 * l.powf(-1.0)))
            .collect();
        let fit = fit_rate(&mixed, 1e-14).unwrap();
        assert!(fit.slope > -0.6 && fit.slope < -0.45);
    }

    #[test]
    fn localization_ratio_matches_gaussian_prediction() {
        let model = FlatModel::torus(2);
        let tau = 0.5;
        let chi = make_chi(2.0f64).unwrap();
        let base = BoundaryPoint::new(vec![0.0, 0.0], vec![0.0, tau], tau).unwrap();
        let chart = build_heisenberg_chart(&model, &base, tau).unwrap();
        let row = localization_diagnostic(&model, &chi, &chart, 100.0, 0.25, 1e-9).unwrap();
        assert!(row.ratio > 0.0 && row.ratio < 1.0);
        // same order as the Gaussian model factor prediction
        assert!(
            row.ratio < 8.0 * row.predicted && row.ratio > row.predicted / 8.0,
            "ratio {} vs predicted {}",
            row.ratio,
            row.predicted
        );
        // zero separation degenerates to ratio 1 by construction
        let same = chart.base.clone();
        let provisional = KernelSumConfig {
            lambda: 100.0,
            tau,
            window: 14.0,
            tail_tol: 1.0,
        };
        let rough =
            PreparedKernel::prepare(&model, &chi, &provisional, KernelKind::Smoothed).unwrap();
        let r0 = rough.eval(&same, &same).norm() / rough.diagonal(&same);
        assert!((r0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors_stay_monotone_across_models_and_radii() {
        // the remaining (m, tau, kernel) combinations of the monotonicity
        // contract not already exercised by the acceptance gates
        let mut config = StudyConfig::default_for(KernelKind::Smoothed);
        config.tau = 1.0;
        config.base_y = vec![0.6, 0.8];
        config.lambdas = vec![50.0, 71.0, 100.0, 141.0, 200.0];
        let report = run_scaling_study(&config).unwrap();
        assert!(
            report.monotone_up_to(0.1),
            "m=2 tau=1 smoothed: {:?}",
            report.rows.iter().map(|r| r.sup_error).collect::<Vec<_>>()
        );

        let mut config = StudyConfig::default_for(KernelKind::Toeplitz);
        config.dim = 1;
        config.tau = 1.0;
        config.base_x = vec![0.3];
        config.base_y = vec![1.0];
        config.lambdas = vec![50.0, 71.0, 100.0, 141.0, 200.0];
        let report = run_scaling_study(&config).unwrap();
        assert!(
            report.monotone_up_to(0.1),
            "m=1 tau=1 Toeplitz: {:?}",
            report.rows.iter().map(|r| r.sup_error).collect::<Vec<_>>()
        );
    }

    #[test]
    fn study_reports_are_deterministic() {
        let mut config = StudyConfig::default_for(KernelKind::Smoothed);
        config.lambdas = vec![50.0, 71.0, 100.0, 141.0, 200.0];
        config.dim = 1;
        config.base_x = vec![0.0];
        config.base_y = vec![0.5];
        let a = run_scaling_study(&config).unwrap();
        let b = run_scaling_study(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        // m = 1 rate is recorded but not asserted; it typically sits at the
        // certified-tail floor.
        assert!(a.rows.iter().all(|r| r.sup_error < 1e-2));
    }

    #[test]
    fn gauge_covariance_across_base_points() {
        // The normalized comparison is chart-gauge covariant at leading
        // order: different base points give comparable sup errors.
        let model = FlatModel::torus(2);
        let tau = 0.5;
        let chi = make_chi(2.0f64).unwrap();
        let grid = ComparisonGrid::standard(2, 0.8f64, 3);
        let mut rng = StdRng::seed_from_u64(71);
        let mut errs = Vec::new();
        for _ in 0..3 {
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let base = BoundaryPoint::new(
                vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
                vec![tau * phi.cos(), tau * phi.sin()],
                tau,
            )
            .unwrap();
            let chart = build_heisenberg_chart(&model, &base, tau).unwrap();
            let err = normalized_error(
                &model,
                &chi,
                &chart,
                &grid,
                KernelKind::Smoothed,
                150.0,
                1e-8,
            )
            .unwrap();
            errs.push(err);
        }
        let max = errs.iter().cloned().fold(0.0f64, f64::max);
        let min = errs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max < 12.0 * min + 1e-3, "errors {errs:?}");
    }
}
