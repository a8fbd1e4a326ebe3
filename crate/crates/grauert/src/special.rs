//! Modified Bessel functions used as independent oracles for the
//! spherical quadratures on the 2-torus.

use crate::scalar::Scalar;

/// Exponentially scaled modified Bessel function e^{-x} I_0(x), x >= 0.
///
/// Power series with iteratively built terms; the largest intermediate is
/// comparable to e^x, so this is safe for x up to ~700 in f64.
pub fn bessel_i0_scaled<S: Scalar>(x: S) -> S {
    ratio_series(x).0
}

/// Exponentially scaled modified Bessel function e^{-x} I_1(x), x >= 0.
pub fn bessel_i1_scaled<S: Scalar>(x: S) -> S {
    ratio_series(x).1
}

/// Ratio I_1(x)/I_0(x), x >= 0.
pub fn bessel_i1_over_i0<S: Scalar>(x: S) -> S {
    let (i0, i1) = ratio_series(x);
    i1 / i0
}

fn ratio_series<S: Scalar>(x: S) -> (S, S) {
    assert!(x >= S::zero(), "modified Bessel oracle needs x >= 0");
    let q = x * x * S::of(0.25);
    // I_0 = Σ t_m,  t_0 = 1,        t_{m} = t_{m-1} q / m²
    // I_1 = (x/2) Σ s_m, s_0 = 1,   s_{m} = s_{m-1} q / (m (m+1))
    let mut t = S::one();
    let mut s = S::one();
    let mut sum0 = t;
    let mut sum1 = s;
    let mut m = S::one();
    for _ in 0..2000 {
        t = t * q / (m * m);
        s = s * q / (m * (m + S::one()));
        sum0 += t;
        sum1 += s;
        if t <= sum0 * S::of(1e-18) && s <= sum1 * S::of(1e-18) {
            break;
        }
        m += S::one();
    }
    let scale = (-x).exp();
    (sum0 * scale, sum1 * scale * x * S::of(0.5))
}
