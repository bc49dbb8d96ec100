//! Polyhomogeneous index sets with exact rational exponents.
//!
//! An [`IndexSet`] is stored in closed form: for every tracked exponent
//! `γ < cap` it records the largest log power `P_γ`, so downward
//! log-closure holds by construction. Sets are closed under translation by
//! a positive rational `stride` (1 for sets built from generators, 2 after a
//! parity filter, halved by [`IndexSet::halve`]).

mod family;
mod skeleton;

pub use family::{Face, IndexFamily};
pub use skeleton::{
    geometric_vanishing, heat_trace_family, heat_trace_family_capped, smooth_skeleton, Parity,
    Skeleton, TraceKind,
};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub type Rational = Ratio<i64>;

/// Default truncation of the time exponent.
pub const DEFAULT_CAP: i64 = 4;

pub fn rat(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Ratio::from_integer(n)
}

/// `a/b` as decimal-free text, e.g. `-3/2` or `2`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("index sets have different caps ({} vs {})", fmt_rational(.0), fmt_rational(.1))]
    CapMismatch(Rational, Rational),
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid index set: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// A failed index-set hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    /// `(γ, p)` is present but `(γ, p−1)` is not.
    LogClosure {
        gamma: Rational,
        missing_p: u32,
    },
    /// `(γ, p)` is present but `(γ + stride, p)` is not.
    ShiftClosure {
        gamma: Rational,
        p: u32,
    },
    /// A stored exponent is not below the cap.
    AboveCap {
        gamma: Rational,
    },
    NonPositiveStride,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LogClosure { gamma, missing_p } => write!(
                f,
                "log-closure violated at exponent {}: power {} missing",
                fmt_rational(gamma),
                missing_p
            ),
            Violation::ShiftClosure { gamma, p } => write!(
                f,
                "shift-closure violated: ({}, {}) present without its translate",
                fmt_rational(gamma),
                p
            ),
            Violation::AboveCap { gamma } => {
                write!(f, "exponent {} is not below the cap", fmt_rational(gamma))
            }
            Violation::NonPositiveStride => write!(f, "stride must be positive"),
        }
    }
}

/// Outcome of [`validate`] / [`validate_generators`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl Validation {
    fn from(violations: Vec<Violation>) -> Self {
        Self {
            valid: violations.is_empty(),
            violations,
        }
    }
}

#[derive(Debug, Clone, Eq)]
pub struct IndexSet {
    points: BTreeMap<Rational, u32>,
    cap: Rational,
    stride: Rational,
}

/// Equality is equality of the tracked point sets and of the caps.
impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.cap == other.cap && self.points == other.points
    }
}

/// Positive rational lcm: `lcm(a/b, c/d) = lcm(a,c)/gcd(b,d)`.
fn rational_lcm(x: Rational, y: Rational) -> Rational {
    let n = x.numer().lcm(y.numer());
    let d = x.denom().gcd(y.denom());
    Ratio::new(n, d)
}

/// Closure of a generator list: every power present at each exponent.
fn closure_powers(
    gens: &[(Rational, u32)],
    cap: Rational,
    stride: Rational,
) -> BTreeMap<Rational, BTreeSet<u32>> {
    let mut out: BTreeMap<Rational, BTreeSet<u32>> = BTreeMap::new();
    for &(g, p) in gens {
        let mut x = g;
        while x < cap {
            out.entry(x).or_default().insert(p);
            x += stride;
        }
    }
    out
}

/// Checks a raw generator list against the index-set hypotheses: log
/// powers at every exponent of the stride-closure must form `0..=P`.
/// Translation closure itself is completed automatically.
pub fn validate_generators(
    gens: &[(Rational, u32)],
    cap: Rational,
    stride: Rational,
) -> Validation {
    if stride <= Rational::zero() {
        return Validation::from(vec![Violation::NonPositiveStride]);
    }
    let mut violations = Vec::new();
    for (gamma, powers) in closure_powers(gens, cap, stride) {
        let max = *powers.iter().next_back().expect("non-empty");
        for p in 0..max {
            if !powers.contains(&p) {
                violations.push(Violation::LogClosure {
                    gamma,
                    missing_p: p,
                });
            }
        }
    }
    Validation::from(violations)
}

/// Checks the invariants of an already constructed set.
pub fn validate(set: &IndexSet) -> Validation {
    let mut violations = Vec::new();
    if set.stride <= Rational::zero() {
        violations.push(Violation::NonPositiveStride);
        return Validation::from(violations);
    }
    for (&g, &p) in &set.points {
        if g >= set.cap {
            violations.push(Violation::AboveCap { gamma: g });
        }
        let next = g + set.stride;
        if next < set.cap && set.points.get(&next).is_none_or(|&q| q < p) {
            violations.push(Violation::ShiftClosure { gamma: g, p });
        }
    }
    Validation::from(violations)
}

impl IndexSet {
    pub fn empty(cap: Rational) -> Self {
        Self {
            points: BTreeMap::new(),
            cap,
            stride: Rational::one(),
        }
    }

    /// The set generated by `gens` under unit translation and log-closure.
    /// Fails when the generators are not log-closed.
    pub fn generated(gens: &[(Rational, u32)], cap: Rational) -> Result<Self, IndexError> {
        Self::generated_with_stride(gens, cap, Rational::one())
    }

    pub fn generated_with_stride(
        gens: &[(Rational, u32)],
        cap: Rational,
        stride: Rational,
    ) -> Result<Self, IndexError> {
        let v = validate_generators(gens, cap, stride);
        if !v.valid {
            return Err(IndexError::Invalid(v.violations));
        }
        let mut points = BTreeMap::new();
        for (g, powers) in closure_powers(gens, cap, stride) {
            points.insert(g, *powers.iter().next_back().expect("non-empty"));
        }
        Ok(Self {
            points,
            cap,
            stride,
        })
    }

    /// `origin + ℕ₀` with no logs.
    pub fn lattice(origin: Rational, cap: Rational) -> Self {
        Self::generated(&[(origin, 0)], cap).expect("a single plain generator is log-closed")
    }

    pub fn cap(&self) -> Rational {
        self.cap
    }

    pub fn stride(&self) -> Rational {
        self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of tracked `(γ, p)` pairs.
    pub fn len(&self) -> usize {
        self.points.values().map(|&p| p as usize + 1).sum()
    }

    pub fn contains(&self, gamma: Rational, p: u32) -> bool {
        self.points.get(&gamma).is_some_and(|&q| p <= q)
    }

    /// Largest log power at `gamma`, if tracked.
    pub fn log_power(&self, gamma: Rational) -> Option<u32> {
        self.points.get(&gamma).copied()
    }

    /// `(γ, P_γ)` in increasing order of γ.
    pub fn exponents(&self) -> impl Iterator<Item = (Rational, u32)> + '_ {
        self.points.iter().map(|(&g, &p)| (g, p))
    }

    /// Every `(γ, p)` pair, ordered lexicographically.
    pub fn points(&self) -> Vec<(Rational, u32)> {
        self.points
            .iter()
            .flat_map(|(&g, &p)| (0..=p).map(move |q| (g, q)))
            .collect()
    }

    pub fn min_exponent(&self) -> Option<Rational> {
        self.points.keys().next().copied()
    }

    /// Minimal generating list: at each exponent the powers not already
    /// implied by the translate one stride below.
    pub fn generators(&self) -> Vec<(Rational, u32)> {
        let mut out = Vec::new();
        for (&g, &p) in &self.points {
            let below = self.points.get(&(g - self.stride)).copied();
            let lo = below.map_or(0, |q| q + 1);
            for q in lo..=p {
                out.push((g, q));
            }
        }
        out
    }

    /// Multiplication by `t^c`: every exponent and the cap move by `c`.
    pub fn shift(&self, c: Rational) -> Self {
        Self {
            points: self.points.iter().map(|(&g, &p)| (g + c, p)).collect(),
            cap: self.cap + c,
            stride: self.stride,
        }
    }

    /// Exponents, cap and stride divided by 2; log powers kept.
    pub fn halve(&self) -> Self {
        let two = int(2);
        Self {
            points: self.points.iter().map(|(&g, &p)| (g / two, p)).collect(),
            cap: self.cap / two,
            stride: self.stride / two,
        }
    }

    /// Keeps exponents with `γ − origin` an even (resp. odd) integer.
    pub fn parity_filter(&self, parity: Parity, origin: Rational) -> Self {
        let want = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let points = self
            .points
            .iter()
            .filter(|(&g, _)| {
                let d = g - origin;
                d.is_integer() && d.to_integer().rem_euclid(2) == want
            })
            .map(|(&g, &p)| (g, p))
            .collect();
        Self {
            points,
            cap: self.cap,
            stride: rational_lcm(self.stride, int(2)),
        }
    }

    /// Plain union; caps must agree.
    pub fn union(&self, other: &Self) -> Result<Self, IndexError> {
        self.check_cap(other)?;
        let mut points = self.points.clone();
        for (&g, &p) in &other.points {
            let e = points.entry(g).or_insert(p);
            *e = (*e).max(p);
        }
        Ok(Self {
            points,
            cap: self.cap,
            stride: self.union_stride(other),
        })
    }

    /// `A ∪ B ∪ {(z, p+q+1) : (z,p) ∈ A, (z,q) ∈ B}`.
    pub fn extended_union(&self, other: &Self) -> Result<Self, IndexError> {
        let mut out = self.union(other)?;
        for (&g, &p) in &self.points {
            if let Some(&q) = other.points.get(&g) {
                out.points.insert(g, p + q + 1);
            }
        }
        Ok(out)
    }

    /// Points with exponent strictly below `bound`, same cap.
    pub fn below(&self, bound: Rational) -> Self {
        Self {
            points: self.points.range(..bound).map(|(&g, &p)| (g, p)).collect(),
            cap: self.cap,
            stride: self.stride,
        }
    }

    /// Points with exponent at least `bound`, same cap.
    pub fn at_least(&self, bound: Rational) -> Self {
        Self {
            points: self.points.range(bound..).map(|(&g, &p)| (g, p)).collect(),
            cap: self.cap,
            stride: self.stride,
        }
    }

    /// Drops all log powers, keeping the exponents.
    pub fn without_logs(&self) -> Self {
        Self {
            points: self.points.keys().map(|&g| (g, 0)).collect(),
            cap: self.cap,
            stride: self.stride,
        }
    }

    fn check_cap(&self, other: &Self) -> Result<(), IndexError> {
        if self.cap != other.cap {
            return Err(IndexError::CapMismatch(self.cap, other.cap));
        }
        Ok(())
    }

    fn union_stride(&self, other: &Self) -> Rational {
        match (self.is_empty(), other.is_empty()) {
            (true, _) => other.stride,
            (_, true) => self.stride,
            _ => rational_lcm(self.stride, other.stride),
        }
    }

    /// Stored point map with an explicit stride; used by the family and
    /// skeleton code to rebuild sets point by point.
    pub(crate) fn from_parts(
        points: BTreeMap<Rational, u32>,
        cap: Rational,
        stride: Rational,
    ) -> Self {
        Self {
            points,
            cap,
            stride,
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (g, p)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if *p == 0 {
                write!(f, "{}", fmt_rational(g))?;
            } else {
                write!(f, "{}·log^{}", fmt_rational(g), p)?;
            }
        }
        write!(f, "}} below {}", fmt_rational(&self.cap))
    }
}

/// Canonical serialized form.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexSetJson {
    cap: [i64; 2],
    stride: [i64; 2],
    generators: Vec<[i64; 3]>,
}

fn checked_ratio(n: i64, d: i64) -> Result<Rational, String> {
    if d == 0 {
        return Err("zero denominator".into());
    }
    Ok(Ratio::new(n, d))
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let json = IndexSetJson {
            cap: [*self.cap.numer(), *self.cap.denom()],
            stride: [*self.stride.numer(), *self.stride.denom()],
            generators: self
                .generators()
                .into_iter()
                .map(|(g, p)| [*g.numer(), *g.denom(), p as i64])
                .collect(),
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = IndexSetJson::deserialize(d)?;
        let cap = checked_ratio(json.cap[0], json.cap[1]).map_err(D::Error::custom)?;
        let stride = checked_ratio(json.stride[0], json.stride[1]).map_err(D::Error::custom)?;
        let mut gens = Vec::with_capacity(json.generators.len());
        for [n, den, p] in json.generators {
            let g = checked_ratio(n, den).map_err(D::Error::custom)?;
            let p = u32::try_from(p).map_err(|_| D::Error::custom("negative log power"))?;
            gens.push((g, p));
        }
        IndexSet::generated_with_stride(&gens, cap, stride).map_err(D::Error::custom)
    }
}
