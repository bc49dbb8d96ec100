//! Hurwitz zeta `ζ_H(s, a) = Σ_{k≥0} (k+a)^{−s}` for real `s ≠ 1`, `a > 0`,
//! by Euler–Maclaurin summation with an explicit remainder bound.

use super::{RealEval, SpecialError};

/// `B_{2j} / (2j)!` for `j = 1..=20`.
const BERNOULLI_OVER_FACT: [f64; 20] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -1.0 / 1_892_437_580.318_364_7,
    1.0 / 74_724_249_600.0,
    -2.952_965_460_756_665_6e-12,
    1.167_645_621_841_621e-13,
    -4.617_122_220_030_954e-15,
    1.825_714_231_677_267e-16,
    -7.219_306_723_659_208e-18,
    2.854_677_510_714_871_6e-19,
    -1.128_791_548_761_497_7e-20,
    4.463_499_430_025_455e-22,
    -1.764_973_702_598_806_6e-23,
    6.979_088_843_945_452e-25,
    -2.759_705_101_474_554e-26,
    1.091_245_016_012_618_3e-27,
    -4.315_049_969_002_941e-29,
];

const DEFAULT_TOL: f64 = 1e-10;

/// `ζ_H(s, a)` with the default target `10⁻¹⁰ · max(1, |ζ|)`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<RealEval, SpecialError> {
    hurwitz_zeta_with(s, a, DEFAULT_TOL)
}

pub fn hurwitz_zeta_with(s: f64, a: f64, tol: f64) -> Result<RealEval, SpecialError> {
    check(s, a)?;
    if s == 1.0 {
        return Err(SpecialError::Pole);
    }
    let (n, shifted) = cutoff(s, a);
    let head = head_sum(s, a, n);
    let pole = shifted.powf(1.0 - s) / (s - 1.0);
    let (tail, rem) = em_tail(s, shifted);
    let value = head.0 + pole + tail;
    let bound = rem + 4.0 * f64::EPSILON * (head.1 + pole.abs() + tail.abs()) * (n as f64).sqrt();
    finish(value, bound, tol)
}

/// `ζ_H(s, a) − ζ_H(s, b)`, which stays finite at `s = 1`
/// (where it equals `ψ(b) − ψ(a)`).
pub fn hurwitz_zeta_difference(s: f64, a: f64, b: f64) -> Result<RealEval, SpecialError> {
    check(s, a)?;
    check(s, b)?;
    let (na, sa) = cutoff(s, a.max(b));
    let n = na;
    let sb = b + n as f64;
    let sa = if a >= b { sa } else { a + n as f64 };
    let ha = head_sum(s, a, n);
    let hb = head_sum(s, b, n);
    // [(N+a)^{1−s} − (N+b)^{1−s}]/(s−1), evaluated without cancellation near s = 1
    let u = 1.0 - s;
    let (la, lb) = (sa.ln(), sb.ln());
    let pole = if u == 0.0 {
        lb - la
    } else {
        -(u * lb).exp() * (u * (la - lb)).exp_m1() / u
    };
    let (ta, ra) = em_tail(s, sa);
    let (tb, rb) = em_tail(s, sb);
    let value = (ha.0 - hb.0) + pole + (ta - tb);
    let bound = ra
        + rb
        + 4.0 * f64::EPSILON * (ha.1 + hb.1 + pole.abs() + ta.abs() + tb.abs()) * (n as f64).sqrt();
    finish(value, bound, DEFAULT_TOL)
}

fn check(s: f64, a: f64) -> Result<(), SpecialError> {
    if !s.is_finite() {
        return Err(SpecialError::Domain(format!("s must be finite, got {s}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(SpecialError::Domain(format!("a must be > 0, got {a}")));
    }
    Ok(())
}

fn finish(value: f64, bound: f64, tol: f64) -> Result<RealEval, SpecialError> {
    let allowed = tol * value.abs().max(1.0);
    if bound > allowed {
        return Err(SpecialError::PrecisionLoss {
            requested: allowed,
            achieved: bound,
        });
    }
    Ok(RealEval::new(value, bound))
}

/// Number of explicit terms `N` and the shifted base `N + a`.
fn cutoff(s: f64, a: f64) -> (usize, f64) {
    let n = (12.0 + s.abs()).ceil() as usize;
    (n, a + n as f64)
}

/// `Σ_{k<N} (k+a)^{−s}` and the sum of magnitudes.
fn head_sum(s: f64, a: f64, n: usize) -> (f64, f64) {
    let mut sum = 0.0;
    let mut abs = 0.0;
    // smallest terms first
    for k in (0..n).rev() {
        let t = (k as f64 + a).powf(-s);
        sum += t;
        abs += t.abs();
    }
    (sum, abs)
}

/// `(N+a)^{−s}/2 + Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j−2) · (N+a)^{−s−2j+1}`
/// together with the remainder bound (twice the first omitted term).
fn em_tail(s: f64, base: f64) -> (f64, f64) {
    let mut sum = 0.5 * base.powf(-s);
    let mut rising = s; // s(s+1)…(s+2j−2)
    let mut power = base.powf(-s - 1.0);
    let inv2 = 1.0 / (base * base);
    let mut prev = f64::INFINITY;
    for (j, c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = c * rising * power;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) || term == 0.0 {
            return (sum, 2.0 * term.abs());
        }
        if term.abs() > prev {
            // asymptotic series started to diverge; the previous term bounds the error
            return (sum, 2.0 * prev);
        }
        sum += term;
        prev = term.abs();
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power *= inv2;
    }
    (sum, 2.0 * prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Direct partial sums plus the integral tail `∫_N^∞ (x+a)^{−s} dx`
    /// and the midpoint correction, used as an independent oracle.
    fn partial_sum_oracle(s: f64, a: f64) -> f64 {
        let n = 200_000usize;
        let mut sum = 0.0;
        for k in (0..n).rev() {
            sum += (k as f64 + a).powf(-s);
        }
        let base = n as f64 + a;
        sum + base.powf(1.0 - s) / (s - 1.0) + 0.5 * base.powf(-s) + s / 12.0 * base.powf(-s - 1.0)
    }

    #[test]
    fn riemann_values() {
        let z2 = hurwitz_zeta(2.0, 1.0).unwrap();
        assert!((z2.value - PI * PI / 6.0).abs() < 1e-10);
        assert!((z2.value - 1.644_934_066_848_226).abs() < 1e-12);
        let z3 = hurwitz_zeta(3.0, 1.0).unwrap().value;
        assert!((z3 - 1.202_056_903_159_594_3).abs() < 1e-10);
        let z4 = hurwitz_zeta(4.0, 1.0).unwrap().value;
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-10);
    }

    #[test]
    fn value_at_zero_is_half_minus_a() {
        for a in [0.25, 0.5, 0.75, 0.1, 1.7] {
            let z = hurwitz_zeta(0.0, a).unwrap().value;
            assert!((z - (0.5 - a)).abs() < 1e-12, "a={a}");
        }
    }

    #[test]
    fn catalan_difference() {
        let d = hurwitz_zeta(2.0, 0.25).unwrap().value - hurwitz_zeta(2.0, 0.75).unwrap().value;
        let oracle = partial_sum_oracle(2.0, 0.25) - partial_sum_oracle(2.0, 0.75);
        assert!((d - oracle).abs() < 1e-10);
        assert!((d - 16.0 * 0.915_965_594_177_219).abs() < 1e-10);
        let via_diff = hurwitz_zeta_difference(2.0, 0.25, 0.75).unwrap().value;
        assert!((via_diff - d).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_partial_sums() {
        for &(s, a) in &[(1.5, 0.3), (2.5, 1.9), (4.0, 0.05), (1.1, 1.0)] {
            let z = hurwitz_zeta(s, a).unwrap();
            let o = partial_sum_oracle(s, a);
            assert!((z.value - o).abs() < 1e-8 * o.abs().max(1.0), "s={s} a={a}");
        }
    }

    #[test]
    fn difference_at_pole_is_digamma_difference() {
        // ψ(3/4) − ψ(1/4) = π
        let d = hurwitz_zeta_difference(1.0, 0.25, 0.75).unwrap().value;
        assert!((d - PI).abs() < 1e-12);
        // continuity across s = 1
        let near = hurwitz_zeta_difference(1.0 + 1e-7, 0.25, 0.75)
            .unwrap()
            .value;
        assert!((near - d).abs() < 1e-5);
    }

    #[test]
    fn shift_recurrence() {
        for &(s, a) in &[(2.0, 0.4), (0.5, 1.3), (-1.5, 0.7)] {
            let lhs = hurwitz_zeta(s, a).unwrap().value;
            let rhs = hurwitz_zeta(s, a + 1.0).unwrap().value + a.powf(-s);
            assert!((lhs - rhs).abs() < 1e-11, "s={s} a={a}");
        }
    }

    #[test]
    fn errors() {
        assert_eq!(hurwitz_zeta(1.0, 0.5), Err(SpecialError::Pole));
        assert!(matches!(
            hurwitz_zeta(2.0, 0.0),
            Err(SpecialError::Domain(_))
        ));
    }
}
