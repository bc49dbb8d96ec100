//! Positive zeros `j_{ν,k}` of `J_ν`.
//!
//! The initial estimate comes from McMahon's expansion when `k` dominates the
//! order, and from the Airy-type uniform expansion (solved for the turning
//! point variable) otherwise. The estimate is bracketed inside a window of
//! width 3, which never holds two zeros since consecutive zeros of `J_ν` are
//! more than `3.1` apart for every `ν ≥ 0`. Newton steps are taken inside
//! the bracket and replaced by bisection whenever they leave it.

use super::bessel::bessel_jy;
use super::{RealEval, SpecialError};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct ZeroOptions {
    /// Absolute tolerance on the zero.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

const HALF_WINDOW: f64 = 1.5;

/// The k-th positive zero of `J_ν` with default options.
pub fn bessel_j_zero(nu: f64, k: u64) -> Result<RealEval, SpecialError> {
    bessel_j_zero_with(nu, k, ZeroOptions::default())
}

pub fn bessel_j_zero_with(nu: f64, k: u64, opts: ZeroOptions) -> Result<RealEval, SpecialError> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(SpecialError::Domain(format!("order must be ≥ 0, got {nu}")));
    }
    if k == 0 {
        return Err(SpecialError::Domain("zero index k starts at 1".into()));
    }
    if nu == 0.5 {
        // J_{1/2}(x) ∝ sin(x)/√x
        let v = k as f64 * PI;
        return Ok(RealEval::new(v, ulp_floor(v)));
    }
    let guess = initial_estimate(nu, k);
    let f = |x: f64| -> Result<(f64, f64), SpecialError> {
        let r = bessel_jy(nu, x)?;
        Ok((r.j, r.jp))
    };
    let mut lo = (guess - HALF_WINDOW).max(f64::MIN_POSITIVE);
    let mut hi = guess + HALF_WINDOW;
    let (mut flo, _) = f(lo)?;
    let (fhi, _) = f(hi)?;
    if flo * fhi > 0.0 {
        return Err(SpecialError::Convergence(format!(
            "no sign change bracketing j_({nu},{k}) near {guess}"
        )));
    }
    let mut x = guess.clamp(lo, hi);
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(RealEval::new(x, ulp_floor(x)));
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let mut next = x - fx / dfx;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        let floor = ulp_floor(x);
        if step <= 0.25 * opts.tol.max(floor) || hi - lo <= floor {
            // one more Newton correction bounds the remaining error
            let (fx, dfx) = f(x)?;
            let corr = fx / dfx;
            let value = x - corr;
            let bound = (corr.abs() + floor).max(floor);
            if bound > opts.tol.max(2.0 * floor) {
                continue;
            }
            return Ok(RealEval::new(value, bound));
        }
    }
    Err(SpecialError::Convergence(format!(
        "refinement of j_({nu},{k}) exceeded {} iterations",
        opts.max_iter
    )))
}

/// Smallest meaningful absolute error at magnitude `x`: two units in the
/// last place.
fn ulp_floor(x: f64) -> f64 {
    2.0 * f64::EPSILON * x.abs().max(1.0)
}

/// McMahon's large-zero expansion, accurate when `k ≫ ν`.
pub fn mcmahon_estimate(nu: f64, k: u64) -> f64 {
    let mu = 4.0 * nu * nu;
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * beta;
    let e2 = e * e;
    let m1 = mu - 1.0;
    beta - m1 / e
        - 4.0 * m1 * (7.0 * mu - 31.0) / (3.0 * e * e2)
        - 32.0 * m1 * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e * e2 * e2)
        - 64.0 * m1 * (6949.0 * mu * mu * mu - 153_855.0 * mu * mu + 1_585_743.0 * mu - 6_277_237.0)
            / (105.0 * e * e2 * e2 * e2)
}

/// Magnitude of the k-th zero of the Airy function `Ai`.
fn airy_zero_abs(k: u64) -> f64 {
    const TABLE: [f64; 10] = [
        2.338_107_410_459_767,
        4.087_949_444_130_971,
        5.520_559_828_095_551,
        6.786_708_090_071_759,
        7.944_133_587_120_853,
        9.022_650_853_340_98,
        10.040_174_341_558_086,
        11.008_524_303_733_263,
        11.936_015_563_236_262,
        12.828_776_752_865_757,
    ];
    if (k as usize) <= TABLE.len() {
        return TABLE[k as usize - 1];
    }
    let t = 3.0 * PI * (4.0 * k as f64 - 1.0) / 8.0;
    let t2 = t.powi(-2);
    t.powf(2.0 / 3.0) * (1.0 + t2 * (5.0 / 48.0 - t2 * (5.0 / 36.0 - t2 * 77_125.0 / 82_944.0)))
}

/// Olver's uniform estimate `j_{ν,k} ≈ ν z(ζ)`, `ζ = ν^{−2/3} a_k`, where
/// `z > 1` solves `√(z²−1) − arcsec z = (2/3)(−ζ)^{3/2}`.
fn uniform_estimate(nu: f64, k: u64) -> f64 {
    let zeta = airy_zero_abs(k) * nu.powf(-2.0 / 3.0);
    let target = 2.0 / 3.0 * zeta.powf(1.5);
    let g = |z: f64| (z * z - 1.0).sqrt() - (1.0 / z).acos() - target;
    // g is increasing in z with g' = √(z²−1)/z
    let mut z = 1.0 + target.max(0.1);
    for _ in 0..60 {
        let gp = (z * z - 1.0).sqrt() / z;
        let next = z - g(z) / gp;
        let next = if next <= 1.0 { 0.5 * (1.0 + z) } else { next };
        if (next - z).abs() < 1e-14 * z {
            z = next;
            break;
        }
        z = next;
    }
    nu * z
}

fn initial_estimate(nu: f64, k: u64) -> f64 {
    if nu < 1.0 || (k as f64) > 1.5 * nu {
        mcmahon_estimate(nu, k)
    } else {
        uniform_estimate(nu, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::special::oracle::{bessel_j_integral, bessel_j_zero_bisect as oracle_zero};

    #[test]
    fn first_zero_of_j0() {
        let z = bessel_j_zero(0.0, 1).unwrap();
        let oracle = oracle_zero(0.0, 2.0, 3.0);
        assert!((oracle - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((z.value - oracle).abs() < 1e-12);
    }

    #[test]
    fn half_order_zeros() {
        for k in 1..=10 {
            let z = bessel_j_zero(0.5, k).unwrap().value;
            assert!((z - k as f64 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn zeros_interlace() {
        for &nu in &[0.0, 0.5, 1.0, 2.5] {
            for k in 1..=20 {
                let a = bessel_j_zero(nu, k).unwrap().value;
                let b = bessel_j_zero(nu + 1.0, k).unwrap().value;
                let c = bessel_j_zero(nu, k + 1).unwrap().value;
                assert!(a < b && b < c, "nu={nu} k={k}: {a} {b} {c}");
            }
        }
    }

    #[test]
    fn zeros_match_sign_change_enumeration() {
        // enumerate every sign change of the integral oracle on a grid
        for &nu in &[0.0, 0.3, 1.0, 2.5, 6.0, 11.5] {
            let series = |x: f64| bessel_j_integral(nu, x);
            let mut k = 0u64;
            // every zero exceeds ν; below that the oracle is only rounding noise
            let mut x = nu.max(0.05);
            let mut prev = series(x);
            while x < 24.0 {
                let nx = x + 0.05;
                let v = series(nx);
                if v * prev < 0.0 {
                    k += 1;
                    let oracle = oracle_zero(nu, x, nx);
                    let got = bessel_j_zero(nu, k).unwrap().value;
                    assert!(
                        (got - oracle).abs() < 1e-9,
                        "nu={nu} k={k}: {got} vs {oracle}"
                    );
                }
                prev = v;
                x = nx;
            }
            assert!(k >= 3);
        }
    }

    #[test]
    fn large_order_zeros_are_roots() {
        for &nu in &[30.0, 99.0, 250.0, 500.0] {
            let mut prev = nu;
            for k in [1u64, 2, 3, 10, 40, 200] {
                let z = bessel_j_zero(nu, k).unwrap().value;
                assert!(z > prev);
                prev = z;
                let r = bessel_jy(nu, z).unwrap();
                assert!(r.j.abs() < 1e-12 * r.jp.abs().max(1e-3), "nu={nu} k={k}");
            }
        }
    }

    #[test]
    fn consecutive_zeros_are_found_in_order() {
        // spacing stays near π for large k, so no zero is skipped
        for &nu in &[0.0, 1.0, 7.5, 40.0] {
            let mut prev = bessel_j_zero(nu, 1).unwrap().value;
            for k in 2..=120 {
                let z = bessel_j_zero(nu, k).unwrap().value;
                let gap = z - prev;
                assert!(gap > 3.0 && gap < 12.0, "nu={nu} k={k} gap={gap}");
                prev = z;
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(bessel_j_zero(-1.0, 1).is_err());
        assert!(bessel_j_zero(1.0, 0).is_err());
    }
}
