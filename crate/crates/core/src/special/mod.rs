//! Real special functions used by the numerical modules.
//!
//! Every evaluation returns a [`RealEval`]: the value together with an
//! absolute error bound. Bounds are propagated by callers, never dropped.
//! Bessel functions of real order and argument, the zeros of `J_ν`,
//! the complementary error function and the Hurwitz zeta function live here.
//! Elementary special functions (erfc, Γ) come from `libm`; the regularized
//! incomplete gamma comes from `statrs`.

mod bessel;
mod zeros;
mod zeta;

#[cfg(test)]
pub(crate) mod oracle;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_j, bessel_j_with, bessel_jy, BesselJY};
pub use zeros::{bessel_j_zero, bessel_j_zero_with, mcmahon_estimate, ZeroOptions};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_difference, hurwitz_zeta_with};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A computed value together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealEval {
    pub value: f64,
    pub abs_error_bound: f64,
}

impl RealEval {
    pub fn new(value: f64, abs_error_bound: f64) -> Self {
        Self {
            value,
            abs_error_bound: abs_error_bound.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    /// `|value − other| ≤ abs_error_bound + slack`.
    pub fn agrees_with(&self, other: f64, slack: f64) -> bool {
        (self.value - other).abs() <= self.abs_error_bound + slack
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("requested tolerance {requested:e} not reachable, error bound is {achieved:e}")]
    PrecisionLoss { requested: f64, achieved: f64 },
    #[error("value overflows f64: {0}")]
    Overflow(String),
    #[error("iteration did not converge: {0}")]
    Convergence(String),
    #[error("pole of the zeta function at s = 1")]
    Pole,
}

/// `erfc(x)` for all real `x`.
///
/// The reflection `erfc(−x) = 2 − erfc(x)` is applied explicitly for
/// negative arguments so that the pair sums to 2 to within one rounding.
pub fn erfc(x: f64) -> RealEval {
    if x.is_nan() {
        return RealEval::new(f64::NAN, f64::INFINITY);
    }
    if x < 0.0 {
        let pos = libm::erfc(-x);
        let value = 2.0 - pos;
        return RealEval::new(value, 4.0 * f64::EPSILON * value.max(f64::MIN_POSITIVE));
    }
    let value = libm::erfc(x);
    RealEval::new(value, 4.0 * f64::EPSILON * value)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> RealEval {
    let value = libm::lgamma(x);
    RealEval::new(value, 8.0 * f64::EPSILON * value.abs().max(1.0))
}

/// `Γ(x)` for real `x` away from the non-positive integers.
pub fn gamma(x: f64) -> RealEval {
    let value = libm::tgamma(x);
    RealEval::new(value, 16.0 * f64::EPSILON * value.abs())
}

/// Upper incomplete gamma `Γ(a, x)` (not regularized), `a > 0`, `x ≥ 0`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return libm::tgamma(a);
    }
    statrs::function::gamma::gamma_ur(a, x) * libm::tgamma(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_fixed_values() {
        assert_eq!(erfc(0.0).value, 1.0);
        assert!((erfc(1.0).value - 0.157_299_207_050_285).abs() < 1e-12);
        for x in [0.3, 1.7] {
            assert!((erfc(-x).value + erfc(x).value - 2.0).abs() <= 2.0 * f64::EPSILON);
        }
    }

    #[test]
    fn erfc_is_decreasing() {
        // strict wherever neighbouring values are distinguishable in f64
        let mut prev = erfc(-8.0).value;
        let mut x = -8.0;
        while x < 30.0 {
            x += 0.01;
            let v = erfc(x).value;
            if (-5.0..26.0).contains(&x) {
                assert!(v < prev, "erfc not strictly decreasing at {x}");
            } else {
                assert!(v <= prev, "erfc increased at {x}");
            }
            prev = v;
        }
    }

    #[test]
    fn incomplete_gamma_matches_erfc() {
        // Γ(1/2, x²) = √π erfc(x)
        for x in [0.1_f64, 0.8, 2.5] {
            let lhs = upper_incomplete_gamma(0.5, x * x);
            let rhs = std::f64::consts::PI.sqrt() * erfc(x).value;
            assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1e-300) + 1e-15);
        }
    }
}
