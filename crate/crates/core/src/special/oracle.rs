//! Slow reference evaluations for tests, built on quadrature rather than
//! on any of the library's own expansions.

use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use std::f64::consts::PI;

/// `J_ν(x)` from Schläfli's integral
/// `(1/π)∫_0^π cos(ντ − x sin τ) dτ − (sin νπ/π)∫_0^∞ e^{−x sinh t − νt} dt`.
pub fn bessel_j_integral(nu: f64, x: f64) -> f64 {
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_intervals: 20_000,
    };
    let a = integrate(|t| (nu * t - x * t.sin()).cos(), 0.0, PI, opts)
        .unwrap()
        .value
        / PI;
    let s = (nu * PI).sin();
    if s.abs() < 1e-300 || x == 0.0 {
        return a;
    }
    let b = integrate_to_infinity(|t| (-x * t.sinh() - nu * t).exp(), 0.0, opts)
        .unwrap()
        .value;
    a - s / PI * b
}

/// Root of [`bessel_j_integral`] in `[lo, hi]` by bisection.
pub fn bessel_j_zero_bisect(nu: f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let fa = bessel_j_integral(nu, a);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if (bessel_j_integral(nu, m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
