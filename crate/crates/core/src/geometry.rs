//! Edge-space and operator descriptors, the geometric Witt condition,
//! and the cone construction used for bounding spaces.

use crate::index::{fmt_rational, Parity, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("stratum {stratum}: {reason}")]
    InvalidStratum { stratum: String, reason: String },
    #[error("{kind:?} is not defined in dimension {m}")]
    KindDimensionMismatch { kind: OperatorKind, m: u32 },
    #[error("operator descriptor: {0}")]
    InvalidOperator(String),
    #[error("link spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("no rescaling satisfies the Witt condition: {0}")]
    Unscalable(String),
}

/// An eigenvalue given either as a float or as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl Eigen {
    pub fn float(value: f64) -> Self {
        Self { value, exact: None }
    }

    pub fn exact(r: Rational) -> Self {
        Self {
            value: *r.numer() as f64 / *r.denom() as f64,
            exact: Some(r),
        }
    }
}

impl std::ops::Neg for Eigen {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            value: -self.value,
            exact: self.exact.map(|r| -r),
        }
    }
}

impl Serialize for Eigen {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.exact {
            Some(r) => s.serialize_str(&fmt_rational(&r)),
            None => s.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Eigen {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Eigen::float(v)),
            Raw::Text(t) => parse_rational(&t)
                .map(Eigen::exact)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = i64::from_str(n).map_err(|e| format!("bad numerator in {text:?}: {e}"))?;
    let d = i64::from_str(d).map_err(|e| format!("bad denominator in {text:?}: {e}"))?;
    if d == 0 {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub eigenvalue: Eigen,
    pub multiplicity: u32,
}

/// Spectrum of the link Dirac operator, as supplied by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpectrum {
    pub entries: Vec<LinkEntry>,
    #[serde(default)]
    pub middle_cohomology_dim: u32,
    #[serde(default)]
    pub symmetric: bool,
}

impl LinkSpectrum {
    pub fn from_floats(pairs: &[(f64, u32)], middle_cohomology_dim: u32) -> Self {
        let entries: Vec<LinkEntry> = pairs
            .iter()
            .map(|&(v, m)| LinkEntry {
                eigenvalue: Eigen::float(v),
                multiplicity: m,
            })
            .collect();
        let mut s = Self {
            entries,
            middle_cohomology_dim,
            symmetric: false,
        };
        s.symmetric = s.is_symmetric();
        s.sort();
        s
    }

    /// Sorts entries by eigenvalue.
    pub fn sort(&mut self) {
        self.entries
            .sort_by(|a, b| a.eigenvalue.value.total_cmp(&b.eigenvalue.value));
    }

    /// Closed under negation with equal multiplicities.
    pub fn is_symmetric(&self) -> bool {
        let total = |pred: &dyn Fn(&Eigen) -> bool| -> u64 {
            self.entries
                .iter()
                .filter(|e| pred(&e.eigenvalue))
                .map(|e| e.multiplicity as u64)
                .sum()
        };
        self.entries.iter().all(|e| {
            let v = e.eigenvalue;
            let mine = total(&|x: &Eigen| same_value(*x, v));
            let mirror = total(&|x: &Eigen| same_value(*x, -v));
            mine == mirror
        })
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.multiplicity == 0 {
                return Err(GeometryError::InvalidSpectrum(format!(
                    "entry {i} has multiplicity 0"
                )));
            }
            if !e.eigenvalue.value.is_finite() {
                return Err(GeometryError::InvalidSpectrum(format!(
                    "entry {i} is not finite"
                )));
            }
        }
        if self.symmetric && !self.is_symmetric() {
            return Err(GeometryError::InvalidSpectrum(
                "declared symmetric but not closed under negation".into(),
            ));
        }
        Ok(())
    }

    /// Every eigenvalue multiplied by `c > 0` (exact values become floats).
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| LinkEntry {
                    eigenvalue: Eigen::float(e.eigenvalue.value * c),
                    multiplicity: e.multiplicity,
                })
                .collect(),
            middle_cohomology_dim: self.middle_cohomology_dim,
            symmetric: self.symmetric,
        }
    }
}

fn same_value(a: Eigen, b: Eigen) -> bool {
    match (a.exact, b.exact) {
        (Some(x), Some(y)) => x == y,
        _ => a.value == b.value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeStratum {
    pub b: u32,
    pub f: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_spectrum: Option<LinkSpectrum>,
}

impl EdgeStratum {
    pub fn new(b: u32, f: u32) -> Self {
        Self {
            b,
            f,
            link_spectrum: None,
        }
    }
}

/// An isolated conical singularity; its link is itself an edge space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConePoint {
    pub link: Box<EdgeDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDescriptor {
    pub m: u32,
    #[serde(default)]
    pub edges: Vec<EdgeStratum>,
    #[serde(default)]
    pub exact_cone_points: Vec<ConePoint>,
}

impl EdgeDescriptor {
    pub fn smooth(m: u32) -> Self {
        Self {
            m,
            edges: Vec::new(),
            exact_cone_points: Vec::new(),
        }
    }

    pub fn with_edges(m: u32, edges: &[(u32, u32)]) -> Self {
        Self {
            m,
            edges: edges.iter().map(|&(b, f)| EdgeStratum::new(b, f)).collect(),
            exact_cone_points: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        self.validate_at("")
    }

    fn validate_at(&self, prefix: &str) -> Result<(), GeometryError> {
        if self.m == 0 {
            return Err(GeometryError::InvalidStratum {
                stratum: format!("{prefix}manifold"),
                reason: "dimension m must be positive".into(),
            });
        }
        for (i, e) in self.edges.iter().enumerate() {
            let stratum = format!("{prefix}edges[{i}] (b={}, f={})", e.b, e.f);
            if e.f < 1 {
                return Err(GeometryError::InvalidStratum {
                    stratum,
                    reason: "fibre dimension f must be at least 1".into(),
                });
            }
            if e.b + e.f + 1 != self.m {
                return Err(GeometryError::InvalidStratum {
                    stratum,
                    reason: format!(
                        "b + f + 1 = {} does not equal m = {}",
                        e.b + e.f + 1,
                        self.m
                    ),
                });
            }
            if let Some(link) = &e.link_spectrum {
                link.validate()
                    .map_err(|err| GeometryError::InvalidStratum {
                        stratum: stratum.clone(),
                        reason: err.to_string(),
                    })?;
            }
        }
        for (i, c) in self.exact_cone_points.iter().enumerate() {
            let here = format!("{prefix}exact_cone_points[{i}].link.");
            if c.link.m + 1 != self.m {
                return Err(GeometryError::InvalidStratum {
                    stratum: format!("{prefix}exact_cone_points[{i}]"),
                    reason: format!(
                        "link dimension {} must be m − 1 = {}",
                        c.link.m,
                        self.m as i64 - 1
                    ),
                });
            }
            c.link.validate_at(&here)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    GaussBonnet,
    Signature,
    OddSignature,
    SpinDirac,
    AllowableCustom,
}

impl OperatorKind {
    pub fn is_geometric(self) -> bool {
        !matches!(self, OperatorKind::AllowableCustom)
    }
}

/// Which Witt gap applies to a custom operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WittBase {
    Spin,
    Hodge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDescriptor {
    pub kind: OperatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_parity: Option<Parity>,
    #[serde(default = "one")]
    pub twist_rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witt_base: Option<WittBase>,
}

fn one() -> u32 {
    1
}

impl OperatorDescriptor {
    pub fn new(kind: OperatorKind) -> Self {
        Self {
            kind,
            declared_parity: None,
            twist_rank: 1,
            witt_base: None,
        }
    }

    pub fn custom(parity: Parity) -> Self {
        Self {
            declared_parity: Some(parity),
            ..Self::new(OperatorKind::AllowableCustom)
        }
    }

    pub fn with_rank(mut self, r: u32) -> Self {
        self.twist_rank = r;
        self
    }

    pub fn validate(&self, m: u32) -> Result<(), GeometryError> {
        if self.twist_rank == 0 {
            return Err(GeometryError::InvalidOperator(
                "twist_rank must be positive".into(),
            ));
        }
        match self.kind {
            OperatorKind::Signature if m % 2 == 1 => {
                Err(GeometryError::KindDimensionMismatch { kind: self.kind, m })
            }
            OperatorKind::OddSignature if m.is_multiple_of(2) => {
                Err(GeometryError::KindDimensionMismatch { kind: self.kind, m })
            }
            OperatorKind::AllowableCustom if self.declared_parity.is_none() => Err(
                GeometryError::InvalidOperator("AllowableCustom requires declared_parity".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn witt_base(&self) -> WittBase {
        match self.kind {
            OperatorKind::SpinDirac => WittBase::Spin,
            OperatorKind::AllowableCustom => self.witt_base.unwrap_or(WittBase::Hodge),
            _ => WittBase::Hodge,
        }
    }
}

/// Parity of an operator relative to one edge stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorParity {
    Even,
    Odd,
    Unclassified,
}

impl OperatorParity {
    pub fn as_parity(self) -> Option<Parity> {
        match self {
            OperatorParity::Even => Some(Parity::Even),
            OperatorParity::Odd => Some(Parity::Odd),
            OperatorParity::Unclassified => None,
        }
    }
}

impl fmt::Display for OperatorParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorParity::Even => "even",
            OperatorParity::Odd => "odd",
            OperatorParity::Unclassified => "unclassified",
        })
    }
}

pub fn operator_parity(
    op: &OperatorDescriptor,
    m: u32,
    b: u32,
) -> Result<OperatorParity, GeometryError> {
    op.validate(m)?;
    let m_minus_b_even = (m as i64 - b as i64).rem_euclid(2) == 0;
    Ok(match op.kind {
        OperatorKind::GaussBonnet => OperatorParity::Even,
        OperatorKind::OddSignature => {
            if m_minus_b_even {
                OperatorParity::Even
            } else {
                OperatorParity::Odd
            }
        }
        OperatorKind::Signature => {
            if b.is_multiple_of(2) {
                OperatorParity::Even
            } else {
                OperatorParity::Unclassified
            }
        }
        OperatorKind::SpinDirac => {
            if m_minus_b_even {
                OperatorParity::Even
            } else {
                OperatorParity::Unclassified
            }
        }
        OperatorKind::AllowableCustom => match op.declared_parity.expect("validated") {
            Parity::Even => OperatorParity::Even,
            Parity::Odd => OperatorParity::Odd,
        },
    })
}

/// Default width of the borderline band around a gap edge.
pub const WITT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WittReport {
    pub pass: bool,
    /// The eigenvalue violating the gap condition, if any.
    pub witness: Option<f64>,
    pub gap_radius: f64,
    pub reasons: Vec<String>,
    pub warnings: Vec<String>,
}

/// [`witt_check_with`] at the default tolerance.
pub fn witt_check(op: &OperatorDescriptor, link: &LinkSpectrum) -> WittReport {
    witt_check_with(op, link, WITT_TOLERANCE)
}

/// Spin: no eigenvalue in `(−1/2, 1/2)`. Hodge-type: no nonzero eigenvalue
/// in `(−1, 1)` and vanishing middle cohomology. Twist rank plays no role.
/// Exact inputs are compared exactly; floats within `tol` of a gap edge
/// produce a warning instead of a failure.
pub fn witt_check_with(op: &OperatorDescriptor, link: &LinkSpectrum, tol: f64) -> WittReport {
    let base = op.witt_base();
    let radius = match base {
        WittBase::Spin => 0.5,
        WittBase::Hodge => 1.0,
    };
    let exact_radius = match base {
        WittBase::Spin => Rational::new(1, 2),
        WittBase::Hodge => Rational::new(1, 1),
    };
    let mut reasons = Vec::new();
    let mut warnings = Vec::new();
    // (|λ|, λ) of violations, smallest magnitude wins, positive on ties
    let mut witness: Option<f64> = None;
    let mut consider = |v: f64| {
        witness = Some(match witness {
            None => v,
            Some(w) if v.abs() < w.abs() || (v.abs() == w.abs() && v > w) => v,
            Some(w) => w,
        });
    };
    for e in &link.entries {
        let ev = e.eigenvalue;
        let inside = match ev.exact {
            Some(r) => {
                let is_zero = r.is_zero();
                let in_gap = r.abs() < exact_radius;
                match base {
                    WittBase::Spin => in_gap,
                    WittBase::Hodge => in_gap && !is_zero,
                }
            }
            None => {
                let a = ev.value.abs();
                if (a - radius).abs() <= tol {
                    warnings.push(format!(
                        "eigenvalue {} lies within {tol:e} of the gap edge {radius}",
                        ev.value
                    ));
                    false
                } else {
                    let is_zero = a <= tol;
                    if is_zero && ev.value != 0.0 {
                        warnings.push(format!("eigenvalue {} treated as zero", ev.value));
                    }
                    match base {
                        WittBase::Spin => a < radius,
                        WittBase::Hodge => a < radius && !is_zero,
                    }
                }
            }
        };
        if inside {
            consider(ev.value);
        }
    }
    if let Some(w) = witness {
        reasons.push(format!(
            "eigenvalue {w} lies in the gap (-{radius}, {radius})"
        ));
    }
    if base == WittBase::Hodge && link.middle_cohomology_dim != 0 {
        reasons.push(format!(
            "middle cohomology has dimension {}",
            link.middle_cohomology_dim
        ));
    }
    WittReport {
        pass: reasons.is_empty(),
        witness,
        gap_radius: radius,
        reasons,
        warnings,
    }
}

/// Smallest `c ≥ 1` such that scaling the link spectrum by `c` clears the
/// Witt gap: `c = radius / min |λ ≠ 0|`.
pub fn suggest_scaling(op: &OperatorDescriptor, link: &LinkSpectrum) -> Result<f64, GeometryError> {
    let base = op.witt_base();
    let has_zero = link.entries.iter().any(|e| e.eigenvalue.value == 0.0);
    match base {
        WittBase::Spin if has_zero => {
            return Err(GeometryError::Unscalable(
                "0 is an eigenvalue of the link operator".into(),
            ))
        }
        WittBase::Hodge if link.middle_cohomology_dim != 0 => {
            return Err(GeometryError::Unscalable(format!(
                "middle cohomology has dimension {}",
                link.middle_cohomology_dim
            )))
        }
        _ => {}
    }
    let min_nonzero = link
        .entries
        .iter()
        .map(|e| e.eigenvalue.value.abs())
        .filter(|&a| a > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_nonzero.is_finite() {
        return Err(GeometryError::InvalidSpectrum(
            "no nonzero eigenvalue to rescale".into(),
        ));
    }
    let radius = match base {
        WittBase::Spin => 0.5,
        WittBase::Hodge => 1.0,
    };
    Ok((radius / min_nonzero).max(1.0))
}

/// The cone `C(M)`: dimension `m+1`, each edge `(b, f)` becomes
/// `(b+1, f)`, each exact cone point of `M` becomes a one-dimensional edge,
/// and the tip is a new exact cone point with link `M`.
pub fn cone_over(manifold: &EdgeDescriptor) -> Result<EdgeDescriptor, GeometryError> {
    manifold.validate()?;
    let mut edges: Vec<EdgeStratum> = manifold
        .edges
        .iter()
        .map(|e| EdgeStratum {
            b: e.b + 1,
            f: e.f,
            link_spectrum: e.link_spectrum.clone(),
        })
        .collect();
    for _ in &manifold.exact_cone_points {
        edges.push(EdgeStratum::new(1, manifold.m - 1));
    }
    Ok(EdgeDescriptor {
        m: manifold.m + 1,
        edges,
        exact_cone_points: vec![ConePoint {
            link: Box::new(manifold.clone()),
        }],
    })
}
