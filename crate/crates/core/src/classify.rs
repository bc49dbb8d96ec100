//! Decides whether the eta invariant of an edge Dirac operator exists,
//! where the residue at `s = 0` comes from, and whether a bounding cone
//! admits an eta invariant.
//!
//! Each verdict also holds verbatim for the Galois-covering eta invariant.

use crate::geometry::{
    operator_parity, witt_check, EdgeDescriptor, GeometryError, OperatorDescriptor, OperatorParity,
};
use crate::index::{
    geometric_vanishing, heat_trace_family, smooth_skeleton, Parity, TraceKind, DEFAULT_CAP,
};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("twisting bundles must have equal rank, got {0} and {1}")]
    RankMismatch(u32, u32),
}

/// Ordered from best to worst; aggregation across strata takes the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    IdenticallyZero,
    WellDefined,
    ResidueInteriorOnly,
    ResidueInteriorAndEdge,
    PossibleDoublePole,
    Unclassified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumVerdict {
    pub index: usize,
    pub b: u32,
    pub f: u32,
    pub parity: OperatorParity,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaStatus {
    pub verdict: Verdict,
    pub reasons: Vec<String>,
    pub strata: Vec<StratumVerdict>,
    /// Set when several strata were combined by taking the worst verdict.
    pub worst_case_aggregation: bool,
    pub exempt_cone_points: usize,
    pub applies_to_galois_coverings: bool,
}

const TAG_GEOMETRIC_EVEN: &str = "geometric-even-dimension:spectral-symmetry";
const TAG_GEOMETRIC_ODD_NO_EDGE: &str = "geometric-odd-dimension:no-edge-half-power";
const TAG_GEOMETRIC_ODD_EDGE: &str = "geometric-odd-dimension:simple-pole-from-edge-only";
const TAG_SAME_EVEN: &str = "same-parity,m-even:no-half-power";
const TAG_SAME_ODD: &str = "same-parity,m-odd:interior-residue";
const TAG_MIXED_EVEN: &str = "mixed-parity,m-even:interior-and-edge-residue";
const TAG_DOUBLE: &str = "mixed-parity,m-odd:half-power-log-term";
const TAG_UNCLASSIFIED: &str = "operator-parity-unclassified";
const TAG_SMOOTH_EVEN: &str = "no-edges,m-even:no-half-power";
const TAG_SMOOTH_ODD: &str = "no-edges,m-odd:interior-residue";
const TAG_CONE_EXEMPT: &str = "exact-cone-points-exempt";
const TAG_WORST: &str = "worst-case-aggregation-over-strata";

/// Verdict for a non-geometric reading of one stratum.
pub fn parity_verdict(m: u32, b: u32, parity: Parity) -> (Verdict, &'static str) {
    let d_even = parity == Parity::Even;
    let b_even = b.is_multiple_of(2);
    let m_minus_b_even = (m - b).is_multiple_of(2);
    let double = if d_even {
        m_minus_b_even && !b_even
    } else {
        !m_minus_b_even && b_even
    };
    if double {
        (Verdict::PossibleDoublePole, TAG_DOUBLE)
    } else if d_even == b_even {
        if m.is_multiple_of(2) {
            (Verdict::WellDefined, TAG_SAME_EVEN)
        } else {
            (Verdict::ResidueInteriorOnly, TAG_SAME_ODD)
        }
    } else {
        (Verdict::ResidueInteriorAndEdge, TAG_MIXED_EVEN)
    }
}

fn stratum_verdict(
    m: u32,
    b: u32,
    f: u32,
    op: &OperatorDescriptor,
    parity: OperatorParity,
) -> Result<(Verdict, &'static str), ClassifyError> {
    if op.kind.is_geometric() && m.is_multiple_of(2) {
        return Ok((Verdict::IdenticallyZero, TAG_GEOMETRIC_EVEN));
    }
    let Some(p) = parity.as_parity() else {
        return Ok((Verdict::Unclassified, TAG_UNCLASSIFIED));
    };
    if op.kind.is_geometric() {
        let skel = heat_trace_family(m, b, f, p, TraceKind::OddTrace)
            .and_then(|s| geometric_vanishing(&s, op.kind))
            .expect("dimensions were validated");
        return Ok(if skel.edge_has_half() || skel.log_at_half() {
            (Verdict::ResidueInteriorAndEdge, TAG_GEOMETRIC_ODD_EDGE)
        } else {
            (Verdict::WellDefined, TAG_GEOMETRIC_ODD_NO_EDGE)
        });
    }
    Ok(parity_verdict(m, b, p))
}

/// Classifies `η(D, s)` at `s = 0` from the dimension of `M`, the parity of
/// `D` and the base dimension of every edge stratum.
pub fn classify_eta(
    manifold: &EdgeDescriptor,
    op: &OperatorDescriptor,
) -> Result<EtaStatus, ClassifyError> {
    manifold.validate()?;
    op.validate(manifold.m)?;
    let m = manifold.m;
    let mut strata = Vec::with_capacity(manifold.edges.len());
    for (index, e) in manifold.edges.iter().enumerate() {
        let parity = operator_parity(op, m, e.b)?;
        let (verdict, reason) = stratum_verdict(m, e.b, e.f, op, parity)?;
        strata.push(StratumVerdict {
            index,
            b: e.b,
            f: e.f,
            parity,
            verdict,
            reason: reason.to_string(),
        });
    }
    let mut reasons = Vec::new();
    let verdict = if let Some(worst) = strata.iter().map(|s| s.verdict).max() {
        for s in &strata {
            if s.verdict == worst && !reasons.contains(&s.reason) {
                reasons.push(s.reason.clone());
            }
        }
        worst
    } else if op.kind.is_geometric() && m.is_multiple_of(2) {
        reasons.push(TAG_GEOMETRIC_EVEN.to_string());
        Verdict::IdenticallyZero
    } else if op.kind.is_geometric() {
        reasons.push(TAG_GEOMETRIC_ODD_NO_EDGE.to_string());
        Verdict::WellDefined
    } else if m.is_multiple_of(2) {
        reasons.push(TAG_SMOOTH_EVEN.to_string());
        Verdict::WellDefined
    } else {
        reasons.push(TAG_SMOOTH_ODD.to_string());
        Verdict::ResidueInteriorOnly
    };
    let worst_case_aggregation = strata.len() > 1;
    if worst_case_aggregation {
        reasons.push(TAG_WORST.to_string());
    }
    let exempt_cone_points = manifold.exact_cone_points.len();
    if exempt_cone_points > 0 {
        reasons.push(TAG_CONE_EXEMPT.to_string());
    }
    Ok(EtaStatus {
        verdict,
        reasons,
        strata,
        worst_case_aggregation,
        exempt_cone_points,
        applies_to_galois_coverings: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryStratum {
    pub index: usize,
    pub b: u32,
    pub ok: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub exists: bool,
    pub strata: Vec<BoundaryStratum>,
    pub exempt_cone_points: usize,
}

/// For a bounding space `X` of dimension `m+1` whose boundary is doubled:
/// the eta invariant exists iff every edge stratum has `(m+1−b)` odd or
/// `b` odd. Exact cone points impose nothing.
pub fn classify_boundary_case(x: &EdgeDescriptor) -> Result<BoundaryReport, ClassifyError> {
    x.validate()?;
    let strata: Vec<BoundaryStratum> = x
        .edges
        .iter()
        .enumerate()
        .map(|(index, e)| {
            let codim_odd = (x.m - e.b) % 2 == 1;
            let b_odd = e.b % 2 == 1;
            let reason = match (codim_odd, b_odd) {
                (true, true) => format!("m+1-b = {} odd and b = {} odd", x.m - e.b, e.b),
                (true, false) => format!("m+1-b = {} odd", x.m - e.b),
                (false, true) => format!("b = {} odd", e.b),
                (false, false) => format!("m+1-b = {} and b = {} both even", x.m - e.b, e.b),
            };
            BoundaryStratum {
                index,
                b: e.b,
                ok: codim_odd || b_odd,
                reason,
            }
        })
        .collect();
    Ok(BoundaryReport {
        exists: strata.iter().all(|s| s.ok),
        strata,
        exempt_cone_points: x.exact_cone_points.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoReason {
    /// Each eta invariant exists on its own.
    IndividuallyRegular,
    /// Local coefficients depend only on the rank and cancel in the difference.
    Cancellation,
    /// A supplied link spectrum violates the Witt condition.
    WittViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoStatus {
    pub defined: bool,
    pub reason: RhoReason,
    pub eta: EtaStatus,
}

/// Whether `ρ = η(D_α) − η(D_β)` is defined for two flat twists of equal
/// rank.
pub fn classify_rho(
    manifold: &EdgeDescriptor,
    op: &OperatorDescriptor,
    ranks: (u32, u32),
) -> Result<RhoStatus, ClassifyError> {
    if ranks.0 != ranks.1 {
        return Err(ClassifyError::RankMismatch(ranks.0, ranks.1));
    }
    let eta = classify_eta(manifold, op)?;
    let witt_ok = manifold
        .edges
        .iter()
        .filter_map(|e| e.link_spectrum.as_ref())
        .all(|l| witt_check(op, l).pass);
    let (defined, reason) = if !witt_ok {
        (false, RhoReason::WittViolated)
    } else if matches!(eta.verdict, Verdict::IdenticallyZero | Verdict::WellDefined) {
        (true, RhoReason::IndividuallyRegular)
    } else {
        (true, RhoReason::Cancellation)
    };
    Ok(RhoStatus {
        defined,
        reason,
        eta,
    })
}

/// Consistency helper: the verdict implied by the `t^{−1/2}` entries of the
/// heat-trace skeleton for a single stratum (or a smooth manifold when
/// `b` is `None`).
pub fn verdict_from_skeleton(m: u32, b: Option<u32>, parity: Parity) -> Verdict {
    let cap = Ratio::from_integer(DEFAULT_CAP);
    let skel = match b {
        Some(b) => heat_trace_family(m, b, m - b - 1, parity, TraceKind::OddTrace)
            .expect("valid dimensions"),
        None => smooth_skeleton(m, TraceKind::OddTrace, cap),
    };
    if skel.log_at_half() {
        Verdict::PossibleDoublePole
    } else if skel.edge_has_half() {
        Verdict::ResidueInteriorAndEdge
    } else if skel.interior_has_half() {
        Verdict::ResidueInteriorOnly
    } else {
        Verdict::WellDefined
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cone_over, LinkSpectrum, OperatorKind};
    use proptest::prelude::*;

    fn custom(p: Parity) -> OperatorDescriptor {
        OperatorDescriptor::custom(p)
    }

    fn one_edge(m: u32, b: u32) -> EdgeDescriptor {
        EdgeDescriptor::with_edges(m, &[(b, m - b - 1)])
    }

    #[test]
    fn examples() {
        let s = classify_eta(&one_edge(4, 2), &custom(Parity::Even)).unwrap();
        assert_eq!(s.verdict, Verdict::WellDefined);
        let s = classify_eta(&one_edge(5, 1), &custom(Parity::Even)).unwrap();
        assert_eq!(s.verdict, Verdict::PossibleDoublePole);
        for b in 0..3 {
            let s = classify_eta(
                &one_edge(4, b),
                &OperatorDescriptor::new(OperatorKind::SpinDirac),
            )
            .unwrap();
            assert_eq!(s.verdict, Verdict::IdenticallyZero);
        }
    }

    #[test]
    fn every_verdict_has_a_reason() {
        for m in 2..9 {
            for b in 0..m - 1 {
                for p in [Parity::Even, Parity::Odd] {
                    let s = classify_eta(&one_edge(m, b), &custom(p)).unwrap();
                    assert!(!s.reasons.is_empty());
                }
            }
        }
        let s = classify_eta(&EdgeDescriptor::smooth(3), &custom(Parity::Odd)).unwrap();
        assert_eq!(s.verdict, Verdict::ResidueInteriorOnly);
        assert!(!s.reasons.is_empty());
    }

    #[test]
    fn geometric_even_dimension_is_zero() {
        for m in [2u32, 4, 6, 8] {
            for b in 0..m - 1 {
                for kind in [
                    OperatorKind::GaussBonnet,
                    OperatorKind::Signature,
                    OperatorKind::SpinDirac,
                ] {
                    let s = classify_eta(&one_edge(m, b), &OperatorDescriptor::new(kind)).unwrap();
                    assert_eq!(s.verdict, Verdict::IdenticallyZero, "m={m} b={b} {kind:?}");
                }
            }
        }
    }

    #[test]
    fn geometric_odd_dimension_has_at_most_a_simple_pole() {
        for m in [3u32, 5, 7] {
            for b in 0..m - 1 {
                for kind in [
                    OperatorKind::GaussBonnet,
                    OperatorKind::OddSignature,
                    OperatorKind::SpinDirac,
                ] {
                    let s = classify_eta(&one_edge(m, b), &OperatorDescriptor::new(kind)).unwrap();
                    assert!(
                        matches!(
                            s.verdict,
                            Verdict::WellDefined
                                | Verdict::ResidueInteriorAndEdge
                                | Verdict::Unclassified
                        ),
                        "m={m} b={b} {kind:?} {:?}",
                        s.verdict
                    );
                }
            }
        }
    }

    #[test]
    fn unclassified_parity_is_not_guessed() {
        let s = classify_eta(
            &one_edge(5, 2),
            &OperatorDescriptor::new(OperatorKind::SpinDirac),
        )
        .unwrap();
        assert_eq!(s.verdict, Verdict::Unclassified);
        assert_eq!(s.strata[0].parity, OperatorParity::Unclassified);
        let even = classify_eta(
            &one_edge(6, 2),
            &OperatorDescriptor::new(OperatorKind::SpinDirac),
        )
        .unwrap();
        assert_eq!(even.verdict, Verdict::IdenticallyZero);
    }

    #[test]
    fn worst_verdict_wins_and_cone_points_are_exempt() {
        let mut d = EdgeDescriptor::with_edges(5, &[(2, 2), (1, 3)]);
        let s = classify_eta(&d, &custom(Parity::Even)).unwrap();
        assert_eq!(s.verdict, Verdict::PossibleDoublePole);
        assert!(s.worst_case_aggregation);
        assert!(s.reasons.iter().any(|r| r == TAG_WORST));
        d.edges.remove(1);
        let before = classify_eta(&d, &custom(Parity::Even)).unwrap().verdict;
        let with_cone = cone_over(&EdgeDescriptor::smooth(4)).unwrap();
        let mut d2 = d.clone();
        d2.exact_cone_points = with_cone.exact_cone_points;
        let after = classify_eta(&d2, &custom(Parity::Even)).unwrap();
        assert_eq!(after.verdict, before);
        assert_eq!(after.exempt_cone_points, 1);
    }

    #[test]
    fn verdicts_match_heat_trace_skeleton() {
        for m in 2..=8u32 {
            for b in 0..m - 1 {
                for p in [Parity::Even, Parity::Odd] {
                    let s = classify_eta(&one_edge(m, b), &custom(p)).unwrap();
                    let skel = heat_trace_family(m, b, m - b - 1, p, TraceKind::OddTrace).unwrap();
                    let has_half = skel.combined.contains(Ratio::new(-1, 2), 0);
                    if !has_half {
                        assert_eq!(s.verdict, Verdict::WellDefined, "m={m} b={b} {p:?}");
                    }
                    match s.verdict {
                        Verdict::WellDefined => assert!(!has_half),
                        Verdict::ResidueInteriorOnly => {
                            assert!(
                                skel.interior_has_half()
                                    && !skel.edge_has_half()
                                    && !skel.log_at_half()
                            )
                        }
                        Verdict::ResidueInteriorAndEdge => {
                            assert!(skel.edge_has_half() && !skel.log_at_half())
                        }
                        Verdict::PossibleDoublePole => assert!(skel.log_at_half()),
                        v => panic!("unexpected {v:?}"),
                    }
                    assert_eq!(s.verdict, verdict_from_skeleton(m, Some(b), p));
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        // b = 2 leaves no room for a fibre when m = 3
        assert!(cone_over(&EdgeDescriptor::with_edges(3, &[(2, 0)])).is_err());
        let x = cone_over(&one_edge(3, 0)).unwrap();
        let r = classify_boundary_case(&x).unwrap();
        assert!(r.exists);
        assert_eq!(r.strata[0].b, 1);
        assert_eq!(r.exempt_cone_points, 1);
        let bad = one_edge(4, 2);
        assert!(!classify_boundary_case(&bad).unwrap().exists);
        assert!(
            classify_boundary_case(&EdgeDescriptor::smooth(4))
                .unwrap()
                .exists
        );
    }

    #[test]
    fn cone_over_odd_manifold_with_even_edges_bounds() {
        for m in [3u32, 5, 7] {
            let even_bs: Vec<(u32, u32)> = (0..m - 1)
                .filter(|b| b % 2 == 0)
                .map(|b| (b, m - b - 1))
                .collect();
            // every subset of the even-dimensional edges
            for mask in 0u32..(1 << even_bs.len()) {
                let edges: Vec<(u32, u32)> = even_bs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| *e)
                    .collect();
                let x = cone_over(&EdgeDescriptor::with_edges(m, &edges)).unwrap();
                assert!(
                    classify_boundary_case(&x).unwrap().exists,
                    "m={m} {edges:?}"
                );
            }
        }
    }

    #[test]
    fn rho_examples() {
        let r = classify_rho(&one_edge(5, 1), &custom(Parity::Even), (2, 2)).unwrap();
        assert!(r.defined);
        assert_eq!(r.reason, RhoReason::Cancellation);
        let r = classify_rho(&one_edge(4, 2), &custom(Parity::Even), (1, 1)).unwrap();
        assert_eq!(r.reason, RhoReason::IndividuallyRegular);
        assert!(matches!(
            classify_rho(&one_edge(4, 2), &custom(Parity::Even), (2, 3)),
            Err(ClassifyError::RankMismatch(2, 3))
        ));
        let mut d = one_edge(4, 2);
        d.edges[0].link_spectrum = Some(LinkSpectrum::from_floats(&[(0.5, 1), (-0.5, 1)], 0));
        let r = classify_rho(&d, &custom(Parity::Even), (1, 1)).unwrap();
        assert!(!r.defined);
    }

    #[test]
    fn status_serializes() {
        let s = classify_eta(&one_edge(5, 1), &custom(Parity::Even)).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["verdict"], "PossibleDoublePole");
    }

    proptest! {
        #[test]
        fn permutation_invariant(m in 3u32..9, picks in prop::collection::vec(0u32..8, 1..5), odd in any::<bool>(), seed in any::<u64>()) {
            let edges: Vec<(u32, u32)> = picks.iter().map(|b| b % (m - 1)).map(|b| (b, m - b - 1)).collect();
            let mut shuffled = edges.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let p = if odd { Parity::Odd } else { Parity::Even };
            let a = classify_eta(&EdgeDescriptor::with_edges(m, &edges), &custom(p)).unwrap();
            let b = classify_eta(&EdgeDescriptor::with_edges(m, &shuffled), &custom(p)).unwrap();
            prop_assert_eq!(a.verdict, b.verdict);
        }
    }
}
