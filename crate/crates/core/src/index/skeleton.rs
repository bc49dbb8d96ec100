//! Index sets of the short-time heat-trace expansion on a single edge
//! stratum, obtained by pushing the diagonal index family forward to the
//! time axis.
//!
//! Pipeline: the diagonal family has `G_td` and `G_ff` (parity-filtered
//! lattices), the front-face set is weighted by `t^{(f+1)/2}` (exponent
//! shift `f+1` before halving), both sets are halved (the time variable is
//! the square of the boundary defining function) and combined by the
//! extended union.

use super::{int, rat, Face, IndexError, IndexFamily, IndexSet, Rational, DEFAULT_CAP};
use crate::geometry::OperatorKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// `Tr e^{−tD²}` or `Tr D e^{−tD²}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Trace,
    OddTrace,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceKind::Trace => "trace",
            TraceKind::OddTrace => "odd_trace",
        })
    }
}

/// Predicted short-time expansion of a heat trace on one stratum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub m: u32,
    pub b: u32,
    pub f: u32,
    pub parity: Parity,
    pub kind: TraceKind,
    /// Powers `t^{ℓ − m/2}` from the temporal diagonal.
    pub interior: IndexSet,
    /// Powers `t^{ℓ + edge_origin}` from the front face.
    pub edge: IndexSet,
    /// Extended union of the two, carrying the log terms.
    pub combined: IndexSet,
    /// `−b/2`, or `−(b+1)/2` for the odd trace of an odd operator.
    pub edge_origin: Rational,
    /// The diagonal index family the expansion was pushed forward from.
    pub family: IndexFamily,
    /// Set when the trace is known to vanish identically.
    pub vanishes_identically: bool,
}

impl Skeleton {
    /// All `(exponent, log power)` pairs of the expansion.
    pub fn terms(&self) -> Vec<(Rational, u32)> {
        self.combined.points()
    }

    /// Terms with exponent strictly below `bound`.
    pub fn terms_below(&self, bound: Rational) -> Vec<(Rational, u32)> {
        self.combined.below(bound).points()
    }

    pub fn log_power_at(&self, gamma: Rational) -> Option<u32> {
        self.combined.log_power(gamma)
    }

    /// Whether `t^{−1/2}` comes from the interior branch.
    pub fn interior_has_half(&self) -> bool {
        self.interior.contains(rat(-1, 2), 0)
    }

    /// Whether `t^{−1/2}` comes from the edge branch.
    pub fn edge_has_half(&self) -> bool {
        self.edge.contains(rat(-1, 2), 0)
    }

    /// Whether `t^{−1/2} log t` is present.
    pub fn log_at_half(&self) -> bool {
        self.combined.contains(rat(-1, 2), 1)
    }
}

fn check_dims(m: u32, b: u32, f: u32) -> Result<(), IndexError> {
    if f < 1 {
        return Err(IndexError::InvalidDimensions(format!(
            "fibre dimension f must be at least 1, got {f}"
        )));
    }
    if b + f + 1 != m {
        return Err(IndexError::InvalidDimensions(format!(
            "b + f + 1 = {} but m = {m}",
            b + f + 1
        )));
    }
    Ok(())
}

/// [`heat_trace_family_capped`] with the default cap 4.
pub fn heat_trace_family(
    m: u32,
    b: u32,
    f: u32,
    parity: Parity,
    kind: TraceKind,
) -> Result<Skeleton, IndexError> {
    heat_trace_family_capped(m, b, f, parity, kind, int(DEFAULT_CAP))
}

/// Index set of powers of `t` (with log powers) in the short-time
/// expansion of `Tr e^{−tD²}` or `Tr D e^{−tD²}` on an edge stratum with
/// base dimension `b` and fibre dimension `f`, tracked below `cap`.
pub fn heat_trace_family_capped(
    m: u32,
    b: u32,
    f: u32,
    parity: Parity,
    kind: TraceKind,
    cap: Rational,
) -> Result<Skeleton, IndexError> {
    check_dims(m, b, f)?;
    let mi = m as i64;
    let w = int(f as i64 + 1);
    let cap_td = cap * int(2);
    let cap_ff = cap_td - w;

    // (−1−m + ℕ₀) ∩ (−2−m + 2ℕ₀)
    let g_td = IndexSet::lattice(int(-1 - mi), cap_td).parity_filter(Parity::Even, int(-2 - mi));
    // the front face keeps the complementary parity for the odd trace of an odd operator
    let ff_origin = match (kind, parity) {
        (TraceKind::OddTrace, Parity::Odd) => int(-1 - mi),
        _ => int(-2 - mi),
    };
    let g_ff = IndexSet::lattice(int(-1 - mi), cap_ff).parity_filter(Parity::Even, ff_origin);

    let interior = g_td.halve();
    let edge = g_ff.shift(w).halve();
    let combined = interior.extended_union(&edge)?;
    let edge_origin = edge.min_exponent().unwrap_or_else(|| {
        // empty only for absurdly small caps; fall back to the formula
        match (kind, parity) {
            (TraceKind::OddTrace, Parity::Odd) => rat(-(b as i64) - 1, 2),
            _ => rat(-(b as i64), 2),
        }
    });
    let family = IndexFamily::new().with(Face::Td, g_td).with(Face::Ff, g_ff);
    Ok(Skeleton {
        m,
        b,
        f,
        parity,
        kind,
        interior,
        edge,
        combined,
        edge_origin,
        family,
        vanishes_identically: false,
    })
}

/// Expansion on a closed manifold (or one whose only singularities are
/// exact cone points): the interior branch `−m/2 + ℕ₀` alone.
pub fn smooth_skeleton(m: u32, kind: TraceKind, cap: Rational) -> Skeleton {
    let mi = m as i64;
    let g_td =
        IndexSet::lattice(int(-1 - mi), cap * int(2)).parity_filter(Parity::Even, int(-2 - mi));
    let interior = g_td.halve();
    Skeleton {
        m,
        b: 0,
        f: 0,
        parity: Parity::Even,
        kind,
        combined: interior.clone(),
        edge: IndexSet::empty(cap),
        interior,
        edge_origin: rat(-(mi), 2),
        family: IndexFamily::new().with(Face::Td, g_td),
        vanishes_identically: false,
    }
}

/// Refines an odd-trace skeleton for a geometric Dirac operator.
///
/// For `m` even the spectrum is symmetric and the trace vanishes. For `m`
/// odd the interior coefficients `A_ℓ` vanish for `2ℓ − m < 1` (the
/// interior branch starts at `t^{1/2}`), and a log term at edge slot `ℓ`
/// survives only for `ℓ ≥ (m+1)/2`.
pub fn geometric_vanishing(skel: &Skeleton, op: OperatorKind) -> Result<Skeleton, IndexError> {
    if !op.is_geometric() {
        return Err(IndexError::NotApplicable(format!(
            "{op:?} is not a geometric Dirac operator"
        )));
    }
    if skel.kind != TraceKind::OddTrace {
        return Err(IndexError::NotApplicable(
            "local vanishing concerns Tr D e^{-tD^2} only".into(),
        ));
    }
    let cap = skel.combined.cap();
    let mut out = skel.clone();
    if skel.m.is_multiple_of(2) {
        out.interior = IndexSet::empty(cap);
        out.edge = IndexSet::empty(cap);
        out.combined = IndexSet::empty(cap);
        out.vanishes_identically = true;
        return Ok(out);
    }
    let interior = skel.interior.at_least(rat(1, 2));
    let mut points: BTreeMap<Rational, u32> = BTreeMap::new();
    for (g, _) in interior.exponents().chain(skel.edge.exponents()) {
        points.insert(g, 0);
    }
    let threshold = rat(skel.m as i64 + 1, 2);
    for (g, p) in skel.combined.exponents() {
        if p > 0 && skel.edge.contains(g, 0) && g - skel.edge_origin >= threshold {
            points.insert(g, p);
        }
    }
    out.combined = IndexSet::from_parts(points, cap, int(1));
    out.interior = interior;
    Ok(out)
}
