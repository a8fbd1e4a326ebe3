//! Acceptance suite: every verification gate of the library at its stated
//! tolerance, one pass/fail line per check (`--nocapture` to see them all).

use grauert::fit::fit_rate;
use grauert::geometry::{
    build_heisenberg_chart, chart_remainder_fit, defining_function, diastasis, flow_in_chart,
    ChartCoords,
};
use grauert::heisenberg::{group_mul, model_szego_kernel, HeisenbergPoint};
use grauert::kernels::KernelKind;
use grauert::models::{BoundaryPoint, FlatModel, LatticeMode, REEB_ORIENTATION};
use grauert::phase::{gaussian_integral_check, phase_critical_data};
use grauert::scaling::{
    cross_consistency_study, localization_diagnostic, run_scaling_study, StudyConfig,
};
use grauert::smoothing::make_chi;
use grauert::special::{bessel_i0_scaled, bessel_i1_scaled};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

const PI: f64 = std::f64::consts::PI;

fn verdict(name: &str, ok: bool, detail: &str, started: Instant) -> bool {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {detail} ({:.2?})", started.elapsed());
    ok
}

fn random_boundary(rng: &mut StdRng, m: usize, tau: f64) -> BoundaryPoint<f64> {
    let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut y: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0f64) + 0.1).collect();
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut y {
        *v *= tau / r;
    }
    BoundaryPoint::new(x, y, tau).unwrap()
}

#[test]
fn stationary_phase_data_is_exact() {
    let t0 = Instant::now();
    let mut ok = true;
    for &tau in &[0.25f64, 0.5, 1.0, 2.0] {
        let report = phase_critical_data(tau).unwrap();
        let expected = [
            [0.0, tau, 0.0, 0.0],
            [tau, 0.0, 0.0, 0.5],
            [0.0, 0.0, 0.0, -0.5],
            [0.0, 0.5, -0.5, 0.0],
        ];
        let expected_inv = [
            [0.0, 1.0 / tau, 1.0 / tau, 0.0],
            [1.0 / tau, 0.0, 0.0, 0.0],
            [1.0 / tau, 0.0, 0.0, -2.0],
            [0.0, 0.0, -2.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                ok &= (report.hessian[i][j] - expected[i][j]).abs() < 1e-12;
                ok &= (report.hessian_inverse[i][j] - expected_inv[i][j]).abs() < 1e-11;
            }
        }
        ok &= report.inverse_residual <= 1e-14;
        ok &= (report.determinant - tau * tau / 4.0).abs() < 1e-13;
        ok &= report.signature == 0;
        ok &= (report.gamma_lambda_tau - 8.0 * PI * PI).abs() < 1e-12;
    }
    let elapsed_ok = t0.elapsed().as_secs_f64() < 1.0;
    let pass = verdict(
        "stationary phase exactness",
        ok && elapsed_ok,
        "Hessian/inverse/determinant/signature and gamma*lambda*tau = 8pi^2 for tau in {0.25,0.5,1,2}",
        t0,
    );
    assert!(pass);
}

#[test]
fn gaussian_integral_is_c_independent() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for &m in &[2usize, 3] {
        for &tau in &[0.5f64, 1.0] {
            let exact = (tau * PI).powi((m - 1) as i32);
            for _ in 0..10 {
                let c: Vec<Complex64> = (0..m - 1)
                    .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect();
                let v = gaussian_integral_check(m, tau, &c).unwrap();
                worst = worst.max((v - Complex64::new(exact, 0.0)).norm() / exact);
            }
        }
    }
    let ok = worst <= 1e-6 && t0.elapsed().as_secs_f64() < 10.0;
    let pass = verdict(
        "Gaussian integral",
        ok,
        &format!(
            "(tau*pi)^(m-1) reproduced for 10 random c, m in {{2,3}}; worst rel dev {worst:.2e}"
        ),
        t0,
    );
    assert!(pass);
}

#[test]
fn model_kernel_identities_hold() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(303);
    let mut ok = true;
    // diagonal value pi^{-(m-1)}
    for degree in 0..3usize {
        let o = HeisenbergPoint::<f64>::identity(degree);
        let k = model_szego_kernel(&o, &o).unwrap();
        ok &= (k.re - PI.powi(-(degree as i32))).abs() < 1e-12 && k.im.abs() < 1e-15;
    }
    let mut worst_assoc = 0.0f64;
    let mut worst_herm = 0.0f64;
    let mut worst_mod = 0.0f64;
    for _ in 0..1000 {
        let mut point = |deg: usize| {
            HeisenbergPoint::new(
                rng.gen_range(-3.0..3.0),
                (0..deg)
                    .map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                    .collect(),
            )
        };
        let (a, b, c) = (point(2), point(2), point(2));
        let lhs = group_mul(&group_mul(&a, &b).unwrap(), &c).unwrap();
        let rhs = group_mul(&a, &group_mul(&b, &c).unwrap()).unwrap();
        worst_assoc = worst_assoc.max((lhs.theta - rhs.theta).abs());
        for (x, y) in lhs.zeta.iter().zip(rhs.zeta.iter()) {
            worst_assoc = worst_assoc.max((x - y).norm());
        }
        let kab = model_szego_kernel(&a, &b).unwrap();
        let kba = model_szego_kernel(&b, &a).unwrap();
        worst_herm = worst_herm.max((kab - kba.conj()).norm());
        let sep: f64 = a
            .zeta
            .iter()
            .zip(&b.zeta)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        let law = (-sep / 2.0).exp() / PI.powi(2);
        worst_mod = worst_mod.max((kab.norm() - law).abs());
    }
    ok &= worst_assoc < 1e-12 && worst_herm < 1e-12 && worst_mod < 1e-12;
    let elapsed_ok = t0.elapsed().as_secs_f64() < 1.0;
    let pass = verdict(
        "model kernel identities",
        ok && elapsed_ok,
        &format!(
            "diagonal, Hermitian ({worst_herm:.1e}), modulus law ({worst_mod:.1e}), associativity ({worst_assoc:.1e}) on 1e3 samples"
        ),
        t0,
    );
    assert!(pass);
}

#[test]
fn heisenberg_chart_contract_holds() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(404);
    let mut ok = true;
    let mut detail = String::new();
    for &m in &[1usize, 2] {
        for &tau in &[0.5f64, 1.0] {
            let model = FlatModel::torus(m);
            let p = random_boundary(&mut rng, m, tau);
            let chart = build_heisenberg_chart(&model, &p, tau).unwrap();
            // linear coefficients of the pushed-forward defining function
            let eps = 1e-3;
            let phi_of = |coords: &ChartCoords<f64>| {
                defining_function(&model, &chart.inverse(coords).unwrap(), tau)
            };
            let zero_u = vec![Complex64::new(0.0, 0.0); m - 1];
            let lin_re_z0 = (phi_of(&ChartCoords {
                z0: Complex64::new(eps, 0.0),
                u: zero_u.clone(),
            }) - phi_of(&ChartCoords {
                z0: Complex64::new(-eps, 0.0),
                u: zero_u.clone(),
            })) / (2.0 * eps);
            ok &= lin_re_z0.abs() < 1e-10;
            for j in 0..m - 1 {
                for dir in [Complex64::new(eps, 0.0), Complex64::new(0.0, eps)] {
                    let mut up = zero_u.clone();
                    up[j] = dir;
                    let mut um = zero_u.clone();
                    um[j] = -dir;
                    let lin = (phi_of(&ChartCoords {
                        z0: Complex64::new(0.0, 0.0),
                        u: up,
                    }) - phi_of(&ChartCoords {
                        z0: Complex64::new(0.0, 0.0),
                        u: um,
                    })) / (2.0 * eps);
                    ok &= lin.abs() < 1e-10;
                }
            }
            let radii: Vec<f64> = (0..8).map(|i| 0.02 * tau * 1.3f64.powi(i)).collect();
            let fit = chart_remainder_fit(&chart, &radii).unwrap();
            ok &= fit.z0_slope >= 2.0 - 0.1;
            ok &= fit.mixed_slope >= 2.0 - 0.1;
            if let Some(us) = fit.u_slope {
                ok &= us >= 3.0 - 0.1;
            } else {
                ok &= m == 1;
            }
            detail.push_str(&format!(
                "m={m},tau={tau}: slopes ({:.2},{},{:.2}); ",
                fit.z0_slope,
                fit.u_slope.map_or("-".into(), |s| format!("{s:.2}")),
                fit.mixed_slope
            ));
        }
    }
    let elapsed_ok = t0.elapsed().as_secs_f64() < 30.0;
    let pass = verdict("Heisenberg chart contract", ok && elapsed_ok, &detail, t0);
    assert!(pass);
}

#[test]
fn reeb_flow_expansion_holds() {
    let t0 = Instant::now();
    let mut ok = true;
    // m = 1: exact translation by 2τt.
    let circle = FlatModel::circle();
    let tau = 0.5;
    let p = BoundaryPoint::new(vec![0.2], vec![tau], tau).unwrap();
    let chart = build_heisenberg_chart(&circle, &p, tau).unwrap();
    let mut worst_m1 = 0.0f64;
    for &t in &[0.01f64, -0.02, 0.05, -0.05] {
        worst_m1 = worst_m1.max(flow_in_chart(&chart, &p, t).unwrap().theta_defect.abs());
    }
    ok &= worst_m1 <= 1e-12;

    // m = 2 base point: fitted slope >= 2, or defects at the numerical
    // floor (the flat drift is exact, so the defect saturates).
    let torus = FlatModel::torus(2);
    let p2 = BoundaryPoint::new(vec![0.4, -0.9], vec![0.3, 0.4], tau).unwrap();
    let chart2 = build_heisenberg_chart(&torus, &p2, tau).unwrap();
    // stay within the |t| <= 0.1 tau validity of the chart-flow expansion
    let ts: Vec<f64> = (0..6).map(|i| 0.0014 * 2f64.powi(i)).collect();
    let defects: Vec<f64> = ts
        .iter()
        .map(|&t| flow_in_chart(&chart2, &p2, t).unwrap().theta_defect.abs())
        .collect();
    let slope_detail;
    if defects.iter().all(|&d| d < 1e-12) {
        slope_detail = "theta defect at floor (exact drift)".to_string();
    } else {
        let samples: Vec<(f64, f64)> = ts.iter().zip(&defects).map(|(&t, &d)| (t, d)).collect();
        let fit = fit_rate(&samples, 1e-15).unwrap();
        ok &= fit.slope >= 2.0;
        slope_detail = format!("theta defect slope {:.2}", fit.slope);
    }
    let elapsed_ok = t0.elapsed().as_secs_f64() < 10.0;
    let pass = verdict(
        "Reeb flow expansion",
        ok && elapsed_ok,
        &format!("m=1 exact to {worst_m1:.1e}; m=2 {slope_detail}"),
        t0,
    );
    assert!(pass);
}

#[test]
fn diastasis_dominates_squared_distance() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(606);
    let mut ok = true;
    let mut detail = String::new();
    for &m in &[1usize, 2] {
        let tau = 0.5;
        let model = FlatModel::torus(m);
        let mut cmin = f64::INFINITY;
        let mut used = 0;
        while used < 1000 {
            let p = random_boundary(&mut rng, m, tau);
            let scale = rng.gen_range(1e-3..5e-2);
            let mut x = p.x.clone();
            for v in &mut x {
                *v += rng.gen_range(-scale..scale);
            }
            let mut y = p.y.clone();
            if m > 1 {
                let ang: f64 = rng.gen_range(-scale..scale);
                let (c0, s0) = (ang.cos(), ang.sin());
                let (y0, y1) = (y[0], y[1]);
                y[0] = c0 * y0 - s0 * y1;
                y[1] = s0 * y0 + c0 * y1;
            }
            let q = BoundaryPoint::new(x, y, tau).unwrap();
            let dx = model.base_distance(&p.x, &q.x).unwrap();
            let dy: f64 =
                p.y.iter()
                    .zip(&q.y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
            let dist2 = dx * dx + dy * dy;
            if dist2 < 1e-12 {
                continue;
            }
            used += 1;
            let d = diastasis(&model, &p.to_tube(), &q.to_tube(), tau).unwrap();
            cmin = cmin.min(d / dist2);
        }
        ok &= cmin > 0.0;
        detail.push_str(&format!("m={m}: fitted c = {cmin:.4}; "));
    }
    let elapsed_ok = t0.elapsed().as_secs_f64() < 10.0;
    let pass = verdict("diastasis lower bound", ok && elapsed_ok, &detail, t0);
    assert!(pass);
}

fn shape_convergence(kind: KernelKind, name: &str, budget_secs: f64) {
    let t0 = Instant::now();
    let config = StudyConfig::default_for(kind);
    let report = run_scaling_study(&config).unwrap();
    let decreasing = report
        .rows
        .windows(2)
        .all(|w| w[1].sup_error < w[0].sup_error);
    let slope = report.fit.slope;
    let in_band = (-0.7..=-0.35).contains(&slope);
    let errs: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{:.2e}", r.sup_error))
        .collect();
    let ok = decreasing && in_band && t0.elapsed().as_secs_f64() < budget_secs;
    let pass = verdict(
        name,
        ok,
        &format!(
            "sup errors [{}] decreasing={decreasing}; fitted exponent {slope:.3} (required band [-0.7, -0.35])",
            errs.join(", ")
        ),
        t0,
    );
    assert!(
        pass,
        "fitted exponent {slope:.3} outside the required band [-0.7, -0.35]: \
         the flat-model chart is an exact quadratic normal form, so the generic \
         half-order correction vanishes and the shape error decays at first order"
    );
}

#[test]
fn smoothed_projection_shape_convergence() {
    shape_convergence(
        KernelKind::Smoothed,
        "smoothed projection shape convergence (m=2, tau=0.5)",
        600.0,
    );
}

#[test]
fn toeplitz_localization_shape_convergence() {
    shape_convergence(
        KernelKind::Toeplitz,
        "Toeplitz localization shape convergence (m=2, tau=0.5)",
        900.0,
    );
}

#[test]
fn kernel_families_are_cross_consistent() {
    let t0 = Instant::now();
    let config = StudyConfig::default_for(KernelKind::Smoothed);
    let report = cross_consistency_study(&config).unwrap();
    let slope = report.fit.slope;
    // sup_t |diff|·sqrt(λ) bounded witnesses the C·λ^{-1/2} envelope
    let envelope = report
        .lambdas
        .iter()
        .zip(&report.sup_differences)
        .map(|(l, d)| d * l.sqrt())
        .fold(0.0f64, f64::max);
    let ok = slope <= -0.35 && envelope.is_finite();
    let pass = verdict(
        "cross-consistency of the kernel families",
        ok,
        &format!("fitted slope {slope:.3} <= -0.35; envelope constant {envelope:.3}"),
        t0,
    );
    assert!(pass);
}

#[test]
fn off_diagonal_localization_is_superpolynomial() {
    let t0 = Instant::now();
    let model = FlatModel::torus(2);
    let tau = 0.5;
    let chi = make_chi(2.0f64).unwrap();
    let base = BoundaryPoint::new(vec![0.0, 0.0], vec![0.0, tau], tau).unwrap();
    let chart = build_heisenberg_chart(&model, &base, tau).unwrap();
    let mut samples = Vec::new();
    let mut detail = String::new();
    for &l in &[50.0f64, 100.0, 200.0, 400.0, 800.0] {
        let row = localization_diagnostic(&model, &chi, &chart, l, 0.25, 1e-9).unwrap();
        samples.push((l, row.ratio));
        detail.push_str(&format!("{:.1e} ", row.ratio));
    }
    let fit = fit_rate(&samples, 1e-12).unwrap();
    let ok = fit.slope <= -2.0 && t0.elapsed().as_secs_f64() < 300.0;
    let pass = verdict(
        "off-diagonal localization",
        ok,
        &format!("ratios [{detail}] fitted slope {:.2} <= -2", fit.slope),
        t0,
    );
    assert!(pass);
}

#[test]
fn toeplitz_spectrum_matches_bessel_oracle() {
    let t0 = Instant::now();
    let torus = FlatModel::torus(2);
    let mu = torus
        .toeplitz_eigenvalue::<f64>(&LatticeMode::new(vec![3, 4]), 1.0, REEB_ORIENTATION)
        .unwrap();
    // series oracle, independent of the quadrature path
    let oracle = 5.0 * bessel_i1_scaled(10.0f64) / bessel_i0_scaled(10.0f64);
    let dev = (mu - oracle).abs();
    let mut ok = dev <= 1e-8;
    let mut table = String::new();
    for &tau in &[0.5f64, 1.0] {
        for &n in &[20.0f64, 50.0, 100.0, 200.0] {
            let mu = torus
                .toeplitz_eigenvalue_at(n, tau, REEB_ORIENTATION)
                .unwrap();
            table.push_str(&format!("(tau={tau},|k|={n}): {:+.4}; ", mu - n));
            ok &= (mu / n - 1.0).abs() < 0.03;
        }
    }
    let elapsed_ok = t0.elapsed().as_secs_f64() < 10.0;
    let pass = verdict(
        "Toeplitz spectrum",
        ok && elapsed_ok,
        &format!(
            "|k|=5, tau=1 quadrature vs Bessel ratio dev {dev:.1e}; deviations mu_k - |k|: {table}"
        ),
        t0,
    );
    assert!(pass);
}

#[test]
fn smoothing_function_contract_holds() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(707);
    let mut ok = true;
    let mut detail = String::new();
    for eps in [1.0f64, 2.0] {
        let chi = make_chi(eps).unwrap();

        // positivity at 1e4 sample points
        let mut min_val = f64::INFINITY;
        for _ in 0..10_000 {
            let s = rng.gen_range(-120.0..120.0f64);
            let v = chi.eval(s);
            min_val = min_val.min(v);
        }
        ok &= min_val >= 0.0;

        // evenness to 1e-10
        let mut worst_even = 0.0f64;
        for _ in 0..200 {
            let s = rng.gen_range(0.0..80.0f64);
            worst_even = worst_even.max((chi.eval_direct(s) - chi.eval_direct(-s)).abs());
        }
        ok &= worst_even <= 1e-10;

        // Fourier support: transforming χ back leaves < 1e-8 mass outside [-ε, ε]
        let samples = 48;
        let mut outside_mass = 0.0;
        let upper = 3.0 * eps;
        for i in 0..samples {
            let t = eps + (upper - eps) * (i as f64 + 0.5) / samples as f64;
            outside_mass += chi.chi_hat_numeric(t).unwrap().abs();
        }
        outside_mass *= 2.0 * (upper - eps) / samples as f64;
        ok &= outside_mass < 1e-8;

        // normalization χ̂(0) = 1 to 1e-10
        let hat0 = chi.chi_hat_numeric(0.0).unwrap();
        ok &= (hat0 - 1.0).abs() <= 1e-10;

        detail.push_str(&format!(
            "eps={eps}: min {min_val:.1e}, evenness {worst_even:.1e}, outside mass {outside_mass:.1e}, hat(0)-1 = {:.1e}; ",
            hat0 - 1.0
        ));
    }
    let elapsed_ok = t0.elapsed().as_secs_f64() < 30.0;
    let pass = verdict("smoothing function contract", ok && elapsed_ok, &detail, t0);
    assert!(pass);
}
