//! Closed-form model spectra (circle, round sphere), Bessel-zero spectra of
//! finite exact cones, and the spin model-cone heat kernel.
//!
//! A [`Spectrum`] stores the nonzero eigenvalues `λ` of a Dirac-type
//! operator `D`; traces use `e^{−tλ²}`. For a cone the Laplace-type
//! eigenvalue is `j²` with `j` a Bessel zero, so the stored `λ` is `j`.

use crate::geometry::LinkSpectrum;
use crate::index::{fmt_rational, Rational};
use crate::special::{bessel_i_scaled, bessel_j_zero, upper_incomplete_gamma, SpecialError};
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("value not representable: {0}")]
    Overflow(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecEntry {
    pub lambda: f64,
    pub multiplicity: u64,
}

/// Counting-function bound `#{|λ| ≤ x} ≤ weyl_const · x^weyl_power` for
/// `x` beyond the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub weyl_power: f64,
    pub weyl_const: f64,
}

impl TailModel {
    /// `Σ_{|λ|>Λ} e^{−tλ²} ≤ C t^{−p/2} Γ(p/2 + 1, tΛ²)`.
    pub fn heat_bound(&self, cutoff: f64, t: f64) -> f64 {
        let p = self.weyl_power;
        self.weyl_const
            * t.powf(-p / 2.0)
            * upper_incomplete_gamma(p / 2.0 + 1.0, t * cutoff * cutoff)
    }

    /// `Σ_{|λ|>Λ} |λ| e^{−tλ²} ≤ C t^{−(p+1)/2} Γ((p+3)/2, tΛ²)`, valid once
    /// `tΛ² ≥ 1/2` where `x e^{−tx²}` is decreasing.
    pub fn odd_bound(&self, cutoff: f64, t: f64) -> f64 {
        let p = self.weyl_power;
        self.weyl_const
            * t.powf(-(p + 1.0) / 2.0)
            * upper_incomplete_gamma((p + 3.0) / 2.0, t * cutoff * cutoff)
    }

    /// `Σ_{|λ|>Λ} |λ|^{−s} ≤ sC Λ^{p−s} / (s−p)` for `s > p`.
    pub fn dirichlet_bound(&self, cutoff: f64, s: f64) -> Option<f64> {
        let p = self.weyl_power;
        (s > p).then(|| s * self.weyl_const * cutoff.powf(p - s) / (s - p))
    }
}

/// The spectrum is `scale · (ℤ + offset)` with no truncation other than the
/// stored cutoff, so its eta function is a Hurwitz-zeta difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeForm {
    pub offset: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub entries: Vec<SpecEntry>,
    pub kernel_dim: u64,
    /// Every eigenvalue with `|λ| ≤ cutoff` is listed; `∞` for a finite
    /// spectrum given in full.
    pub cutoff: f64,
    pub tail: Option<TailModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeForm>,
}

/// Eigenvalues sharing one absolute value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsGroup {
    pub abs: f64,
    pub positive: u64,
    pub negative: u64,
}

impl AbsGroup {
    pub fn net(&self) -> i128 {
        self.positive as i128 - self.negative as i128
    }

    pub fn total(&self) -> u64 {
        self.positive + self.negative
    }
}

fn sort_entries(entries: &mut [SpecEntry]) {
    entries.sort_by(|a, b| {
        a.lambda
            .abs()
            .total_cmp(&b.lambda.abs())
            .then(a.lambda.total_cmp(&b.lambda))
    });
}

impl Spectrum {
    /// Zero eigenvalues are moved into the kernel dimension; entries are
    /// sorted by `|λ|` (negative first on ties).
    pub fn new(
        entries: Vec<SpecEntry>,
        kernel_dim: u64,
        cutoff: f64,
        tail: Option<TailModel>,
    ) -> Self {
        let mut h = kernel_dim;
        let mut kept: Vec<SpecEntry> = Vec::with_capacity(entries.len());
        for e in entries {
            if e.lambda == 0.0 {
                h += e.multiplicity;
            } else if e.multiplicity > 0 {
                kept.push(e);
            }
        }
        sort_entries(&mut kept);
        Self {
            entries: kept,
            kernel_dim: h,
            cutoff,
            tail,
            lattice: None,
        }
    }

    /// A finite spectrum listed in full.
    pub fn finite(pairs: &[(f64, u64)], kernel_dim: u64) -> Self {
        let entries = pairs
            .iter()
            .map(|&(lambda, multiplicity)| SpecEntry {
                lambda,
                multiplicity,
            })
            .collect();
        Self::new(entries, kernel_dim, f64::INFINITY, None)
    }

    pub fn validate(&self) -> Result<(), SpectraError> {
        if !(self.cutoff > 0.0) {
            return Err(SpectraError::Domain(format!(
                "cutoff must be positive, got {}",
                self.cutoff
            )));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if !e.lambda.is_finite() || e.lambda == 0.0 {
                return Err(SpectraError::Domain(format!(
                    "entry {i}: eigenvalue {} not allowed",
                    e.lambda
                )));
            }
            if e.multiplicity == 0 {
                return Err(SpectraError::Domain(format!(
                    "entry {i}: zero multiplicity"
                )));
            }
            if e.lambda.abs() > self.cutoff {
                return Err(SpectraError::Domain(format!(
                    "entry {i}: |{}| exceeds the cutoff {}",
                    e.lambda, self.cutoff
                )));
            }
        }
        if self
            .entries
            .windows(2)
            .any(|w| w[0].lambda.abs() > w[1].lambda.abs())
        {
            return Err(SpectraError::Domain("entries not sorted by |λ|".into()));
        }
        if let Some(t) = self.tail {
            if !(t.weyl_power > 0.0 && t.weyl_const > 0.0) {
                return Err(SpectraError::Domain(
                    "tail model must have positive power and constant".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.cutoff.is_infinite()
    }

    /// Groups by exact `|λ|`; the sort order makes equal magnitudes adjacent.
    pub fn abs_groups(&self) -> Vec<AbsGroup> {
        let mut out: Vec<AbsGroup> = Vec::new();
        for e in &self.entries {
            let a = e.lambda.abs();
            if out.last().is_none_or(|g| g.abs != a) {
                out.push(AbsGroup {
                    abs: a,
                    positive: 0,
                    negative: 0,
                });
            }
            let g = out.last_mut().expect("just pushed");
            if e.lambda > 0.0 {
                g.positive += e.multiplicity;
            } else {
                g.negative += e.multiplicity;
            }
        }
        out
    }

    /// Closed under `λ ↦ −λ` with equal multiplicities (checked exactly).
    pub fn is_symmetric(&self) -> bool {
        self.abs_groups().iter().all(|g| g.net() == 0)
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// `#{0 < |λ| ≤ x}` counted with multiplicity.
    pub fn count_below(&self, x: f64) -> u64 {
        self.entries
            .iter()
            .take_while(|e| e.lambda.abs() <= x)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn negated(&self) -> Self {
        let mut entries: Vec<SpecEntry> = self
            .entries
            .iter()
            .map(|e| SpecEntry {
                lambda: -e.lambda,
                multiplicity: e.multiplicity,
            })
            .collect();
        sort_entries(&mut entries);
        Self {
            entries,
            lattice: self.lattice.map(|l| LatticeForm {
                offset: if l.offset == 0.0 { 0.0 } else { 1.0 - l.offset },
                scale: l.scale,
            }),
            ..self.clone()
        }
    }

    /// Every eigenvalue multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| SpecEntry {
                    lambda: e.lambda * c,
                    multiplicity: e.multiplicity,
                })
                .collect(),
            kernel_dim: self.kernel_dim,
            cutoff: self.cutoff * c,
            tail: self.tail.map(|t| TailModel {
                weyl_power: t.weyl_power,
                weyl_const: t.weyl_const * c.powf(-t.weyl_power),
            }),
            lattice: self.lattice.map(|l| LatticeForm {
                offset: l.offset,
                scale: l.scale * c,
            }),
        }
    }

    /// Direct sum of two spectra, complete up to the smaller cutoff.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        let entries: Vec<SpecEntry> = self
            .entries
            .iter()
            .chain(&other.entries)
            .filter(|e| e.lambda.abs() <= cutoff)
            .copied()
            .collect();
        let tail = match (self.tail, other.tail) {
            (Some(a), Some(b)) => {
                let p = a.weyl_power.max(b.weyl_power);
                // x ≥ cutoff ≥ 1 is assumed when merging powers
                Some(TailModel {
                    weyl_power: p,
                    weyl_const: a.weyl_const + b.weyl_const,
                })
            }
            (Some(a), None) if other.is_complete() => Some(a),
            (None, Some(b)) if self.is_complete() => Some(b),
            _ => None,
        };
        Self::new(entries, self.kernel_dim + other.kernel_dim, cutoff, tail)
    }

    /// A counting-function model from the listed eigenvalues when none was
    /// supplied: power from the counts at `Λ/2` and `Λ`, constant doubled.
    pub fn effective_tail(&self) -> Option<TailModel> {
        if self.tail.is_some() || self.is_complete() {
            return self.tail;
        }
        let n_full = self.count_below(self.cutoff) as f64;
        let n_half = self.count_below(self.cutoff / 2.0) as f64;
        if n_full == 0.0 || n_half == 0.0 {
            return None;
        }
        let p = (n_full / n_half).log2().max(1.0);
        Some(TailModel {
            weyl_power: p,
            weyl_const: 2.0 * n_full / self.cutoff.powf(p),
        })
    }
}

/// `{n + a : n ∈ ℤ, |n + a| ≤ cutoff}`, each simple; `h = 1` iff `a = 0`.
pub fn circle_dirac_spectrum(a: f64, cutoff: f64) -> Result<Spectrum, SpectraError> {
    if !(0.0..1.0).contains(&a) {
        return Err(SpectraError::Domain(format!(
            "offset a must lie in [0, 1), got {a}"
        )));
    }
    if !(cutoff >= 1.0) || !cutoff.is_finite() {
        return Err(SpectraError::Domain(format!(
            "cutoff must be finite and ≥ 1, got {cutoff}"
        )));
    }
    let n_max = cutoff.ceil() as i64 + 1;
    let mut entries = Vec::new();
    let mut h = 0;
    for n in -n_max..=n_max {
        let lambda = n as f64 + a;
        if lambda == 0.0 {
            h += 1;
        } else if lambda.abs() <= cutoff {
            entries.push(SpecEntry {
                lambda,
                multiplicity: 1,
            });
        }
    }
    let mut s = Spectrum::new(
        entries,
        h,
        cutoff,
        Some(TailModel {
            weyl_power: 1.0,
            weyl_const: 3.0,
        }),
    );
    s.lattice = Some(LatticeForm {
        offset: a,
        scale: 1.0,
    });
    Ok(s)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Dirac spectrum of the round unit sphere `S^f`: `±(f/2 + k)`, `k ≥ 0`,
/// each with multiplicity `2^{⌊f/2⌋} C(k+f−1, k)`.
pub fn sphere_dirac_spectrum(f: u32, cutoff: f64) -> Result<Spectrum, SpectraError> {
    if f < 1 {
        return Err(SpectraError::Domain(
            "sphere dimension must be at least 1".into(),
        ));
    }
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(SpectraError::Domain(format!(
            "cutoff must be finite and positive, got {cutoff}"
        )));
    }
    let spinor = 1u64 << (f / 2);
    let mut entries = Vec::new();
    let mut k = 0u64;
    loop {
        let lambda = f as f64 / 2.0 + k as f64;
        if lambda > cutoff {
            break;
        }
        let mult = binomial(k + f as u64 - 1, k)
            .and_then(|b| b.checked_mul(spinor))
            .ok_or_else(|| SpectraError::Overflow(format!("multiplicity at k = {k}")))?;
        entries.push(SpecEntry {
            lambda,
            multiplicity: mult,
        });
        entries.push(SpecEntry {
            lambda: -lambda,
            multiplicity: mult,
        });
        k += 1;
    }
    // #{|λ| ≤ x} = 2·2^{⌊f/2⌋} C(K+f, f) ≤ 2^{⌊f/2⌋+1} (2x)^f / f!
    let factorial: f64 = (1..=f).map(|i| i as f64).product();
    let weyl_const = (spinor as f64) * 2.0 * 2f64.powi(f as i32) / factorial;
    Ok(Spectrum::new(
        entries,
        0,
        cutoff,
        Some(TailModel {
            weyl_power: f as f64,
            weyl_const,
        }),
    ))
}

/// `ν±(μ) = |2μ ∓ 1| / 2`.
pub fn spin_cone_nu(mu: f64) -> (f64, f64) {
    ((2.0 * mu - 1.0).abs() / 2.0, (2.0 * mu + 1.0).abs() / 2.0)
}

/// Exact version of [`spin_cone_nu`].
pub fn spin_cone_nu_exact(mu: Rational) -> (Rational, Rational) {
    let two = Ratio::from_integer(2);
    let one = Ratio::from_integer(1);
    ((two * mu - one).abs() / two, (two * mu + one).abs() / two)
}

/// Source of Bessel zeros `j_{ν,k}`, keyed by exact `ν`.
pub trait ZeroSource: Sync {
    fn zero(&self, nu: Rational, k: u64) -> Result<f64, SpecialError>;
}

/// Computes every zero afresh.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectZeros;

impl ZeroSource for DirectZeros {
    fn zero(&self, nu: Rational, k: u64) -> Result<f64, SpecialError> {
        Ok(bessel_j_zero(rational_to_f64(nu), k)?.value)
    }
}

pub fn rational_to_f64(r: Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// One angular mode of a cone: Bessel order and multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeMode {
    pub nu: Rational,
    pub multiplicity: u64,
}

/// Maps each link eigenvalue to a Bessel order. Float eigenvalues are
/// converted to the nearest rational with denominator at most `10^6`.
pub fn link_modes<F>(link: &LinkSpectrum, nu_map: F) -> Result<Vec<ConeMode>, SpectraError>
where
    F: Fn(Rational) -> Rational,
{
    link.entries
        .iter()
        .map(|e| {
            let mu = match e.eigenvalue.exact {
                Some(r) => r,
                None => approximate(e.eigenvalue.value)?,
            };
            let nu = nu_map(mu);
            if nu < Rational::zero() {
                return Err(SpectraError::Domain(format!(
                    "nu map gave negative order {} for mu = {}",
                    fmt_rational(&nu),
                    fmt_rational(&mu)
                )));
            }
            Ok(ConeMode {
                nu,
                multiplicity: e.multiplicity as u64,
            })
        })
        .collect()
}

fn approximate(x: f64) -> Result<Rational, SpectraError> {
    if !x.is_finite() {
        return Err(SpectraError::Domain(format!(
            "eigenvalue {x} is not finite"
        )));
    }
    // continued fraction with bounded denominator
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1).and_then(|v| v.checked_add(h0));
        let k2 = ai.checked_mul(k1).and_then(|v| v.checked_add(k0));
        let (Some(h2), Some(k2)) = (h2, k2) else {
            break;
        };
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    Ok(Ratio::new(h1, k1))
}

/// Modes of the flat unit disk viewed as the cone over the unit circle:
/// `ν = |n|` for `|n| ≤ n_max`.
pub fn disk_modes(n_max: u64) -> Vec<ConeMode> {
    let mut out = vec![ConeMode {
        nu: Rational::zero(),
        multiplicity: 1,
    }];
    for n in 1..=n_max {
        out.push(ConeMode {
            nu: Ratio::from_integer(n as i64),
            multiplicity: 2,
        });
    }
    out
}

/// Eigenvalues `j_{ν,k}` (stored as `λ = j`, so the Laplace-type eigenvalue
/// is `λ²`) of the exact cone of radius 1 with a Dirichlet condition at the
/// outer boundary and the Friedrichs extension at the tip.
///
/// Zeros up to `cutoff` are enumerated for every mode, at most `k_max`
/// per mode. The returned cutoff is lowered to the smallest omitted zero
/// when `k_max` truncates. Modes are assumed to include every order whose
/// first zero lies below the cutoff.
/// `(j, ν, k, multiplicity)` for one Bessel zero.
type ZeroRow = (f64, Rational, u64, u64);

pub fn cone_eigenvalues(
    modes: &[ConeMode],
    k_max: Option<u64>,
    cutoff: f64,
    source: &dyn ZeroSource,
) -> Result<Spectrum, SpectraError> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(SpectraError::Domain(format!(
            "cutoff must be finite and positive, got {cutoff}"
        )));
    }
    let per_mode: Vec<Result<(Vec<ZeroRow>, f64), SpecialError>> = modes
        .par_iter()
        .map(|mode| {
            let mut out = Vec::new();
            let mut k = 1u64;
            loop {
                let j = source.zero(mode.nu, k)?;
                if j > cutoff {
                    return Ok((out, f64::INFINITY));
                }
                if k_max.is_some_and(|km| k > km) {
                    return Ok((out, j));
                }
                out.push((j, mode.nu, k, mode.multiplicity));
                k += 1;
            }
        })
        .collect();
    let mut all = Vec::new();
    let mut effective = cutoff;
    for r in per_mode {
        let (zeros, omitted) = r?;
        all.extend(zeros);
        if omitted < effective {
            effective = omitted;
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let entries: Vec<SpecEntry> = all
        .into_iter()
        .filter(|z| z.0 < effective || effective == cutoff)
        .map(|(j, _, _, m)| SpecEntry {
            lambda: j,
            multiplicity: m,
        })
        .collect();
    Ok(Spectrum::new(entries, 0, effective, None))
}

/// The unit disk with Dirichlet condition: every `j_{n,k} ≤ cutoff`, with
/// the counting bound `#{j ≤ x} ≤ x²/4`.
pub fn unit_disk_spectrum(cutoff: f64, source: &dyn ZeroSource) -> Result<Spectrum, SpectraError> {
    // j_{n,1} > n, so orders above the cutoff contribute nothing
    let n_max = cutoff.floor() as u64;
    let mut s = cone_eigenvalues(&disk_modes(n_max), None, cutoff, source)?;
    s.tail = Some(TailModel {
        weyl_power: 2.0,
        weyl_const: 0.25,
    });
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinSign {
    Plus,
    Minus,
}

/// `H±_μ(t, s, s̃) = (1/2t) (ss̃)^{(1−f)/2} I_{ν±(μ)}(ss̃/2t) e^{−(s²+s̃²)/4t}`,
/// evaluated as `(1/2t)(ss̃)^{(1−f)/2} e^{−z} I_ν(z) · e^{−(s−s̃)²/4t}`.
pub fn spin_cone_heat_kernel(
    mu: f64,
    sign: SpinSign,
    f: u32,
    t: f64,
    s: f64,
    s_tilde: f64,
) -> Result<f64, SpectraError> {
    if !(t > 0.0 && s > 0.0 && s_tilde > 0.0) {
        return Err(SpectraError::Domain(format!(
            "t, s, s̃ must be positive, got ({t}, {s}, {s_tilde})"
        )));
    }
    let (nu_plus, nu_minus) = spin_cone_nu(mu);
    let nu = match sign {
        SpinSign::Plus => nu_plus,
        SpinSign::Minus => nu_minus,
    };
    let z = s * s_tilde / (2.0 * t);
    let scaled = bessel_i_scaled(nu, z)?.value;
    let gauss = (-(s - s_tilde).powi(2) / (4.0 * t)).exp();
    let power = (0.5 * (1.0 - f as f64) * (s * s_tilde).ln()).exp();
    let v = scaled * gauss * power / (2.0 * t);
    if !v.is_finite() {
        return Err(SpectraError::Overflow(format!(
            "kernel at t={t}, s={s}, s̃={s_tilde}"
        )));
    }
    Ok(v)
}
