//! Least-squares line fits and log-log convergence-rate estimation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::Serialize;

/// Ordinary least squares fit y = slope * x + intercept.
pub fn fit_line<S: Scalar>(xs: &[S], ys: &[S]) -> Result<(S, S)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::FitFailure(format!(
            "need at least two paired samples, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = S::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<S>() / n;
    let my = ys.iter().copied().sum::<S>() / n;
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= S::zero() {
        return Err(Error::FitFailure("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Result of a log-log rate fit.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit<S> {
    /// Fitted exponent (slope of log error against log parameter).
    pub slope: S,
    pub intercept: S,
    /// Jackknife confidence band for the slope (slope ± 2 se).
    pub slope_lo: S,
    pub slope_hi: S,
    /// Set when some errors sat at or below the numerical floor and were
    /// clamped; the fitted exponent then underestimates the true rate.
    pub floor_limited: bool,
    /// Set when the fitted slope is above -0.05, i.e. the data shows no
    /// usable convergence.
    pub non_convergent: bool,
}

/// Fit err ~ C * x^slope from (x, err) samples by least squares in log-log
/// coordinates, with a leave-one-out jackknife band for the slope.
///
/// Errors at or below `floor` are clamped to the floor and flagged.
pub fn fit_rate<S: Scalar>(samples: &[(S, S)], floor: S) -> Result<RateFit<S>> {
    if samples.len() < 5 {
        return Err(Error::FitFailure(format!(
            "rate fits need at least 5 samples, got {}",
            samples.len()
        )));
    }
    let span = samples
        .iter()
        .map(|&(x, _)| x)
        .fold((S::infinity(), S::zero()), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    if span.1 < S::of(4.0) * span.0 {
        return Err(Error::FitFailure(
            "rate fits need abscissae spanning a factor of at least 4".into(),
        ));
    }
    let mut floor_limited = false;
    let mut xs = Vec::with_capacity(samples.len());
    let mut ys = Vec::with_capacity(samples.len());
    for &(x, e) in samples {
        if !(e > S::zero()) || !(x > S::zero()) {
            return Err(Error::FitFailure("rate fit needs positive data".into()));
        }
        let clamped = if e <= floor {
            floor_limited = true;
            floor
        } else {
            e
        };
        xs.push(x.ln());
        ys.push(clamped.ln());
    }
    let (slope, intercept) = fit_line(&xs, &ys)?;

    // Leave-one-out jackknife on the slope.
    let n = samples.len();
    let mut loo = Vec::with_capacity(n);
    for skip in 0..n {
        let xs_i: Vec<S> = xs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .map(|(_, &v)| v)
            .collect();
        let ys_i: Vec<S> = ys
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .map(|(_, &v)| v)
            .collect();
        loo.push(fit_line(&xs_i, &ys_i)?.0);
    }
    let nf = S::of_usize(n);
    let mean = loo.iter().copied().sum::<S>() / nf;
    let var = loo.iter().map(|&s| (s - mean) * (s - mean)).sum::<S>() * (nf - S::one()) / nf;
    let se = var.sqrt();
    let band = S::of(2.0) * se;
    Ok(RateFit {
        slope,
        intercept,
        slope_lo: slope - band,
        slope_hi: slope + band,
        floor_limited,
        non_convergent: slope > S::of(-0.05),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovers_slope() {
        let data: Vec<(f64, f64)> = [50.0, 71.0, 100.0, 141.0, 200.0, 283.0, 400.0]
            .iter()
            .map(|&l: &f64| (l, l.powf(-0.5)))
            .collect();
        let fit = fit_rate(&data, 1e-300).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12, "slope {}", fit.slope);
        assert!(!fit.floor_limited && !fit.non_convergent);
    }

    #[test]
    fn mixed_power_law_lands_between_orders() {
        let data: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&l: &f64| (l, l.powf(-0.5) + l.powf(-1.0)))
            .collect();
        let fit = fit_rate(&data, 1e-300).unwrap();
        assert!(fit.slope > -0.6 && fit.slope < -0.45, "slope {}", fit.slope);
    }

    #[test]
    fn constant_data_is_flagged_non_convergent() {
        let data: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&l| (l, 0.37))
            .collect();
        let fit = fit_rate(&data, 1e-300).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!(fit.non_convergent);
    }

    #[test]
    fn floor_clamping_is_reported() {
        let data: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&l: &f64| (l, (l.powf(-3.0)).max(5e-9)))
            .collect();
        let fit = fit_rate(&data, 5e-9).unwrap();
        assert!(fit.floor_limited);
    }

    #[test]
    fn narrow_span_is_rejected() {
        let data: Vec<(f64, f64)> = (0..6).map(|i| (100.0 + i as f64, 1.0)).collect();
        assert!(fit_rate(&data, 1e-300).is_err());
    }
}
