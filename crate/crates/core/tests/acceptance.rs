//! Acceptance suite. Prints one PASS/FAIL line per criterion with its
//! wall time and budget, then exits non-zero if any criterion failed.
//!
//! Oracles here are written independently of the library: closed-form
//! exponent ladders, the literal parity conditions, a power-series `J_0`
//! with bisection, composite Gauss-Legendre quadrature and generator-level
//! enumeration of the extended union.

use edge_eta::classify::{classify_boundary_case, classify_eta, Verdict};
use edge_eta::eta::{circle_skeleton, eta_numeric, rho_aps, rho_cheeger_gromov_model, EtaOptions};
use edge_eta::geometry::{
    cone_over, operator_parity, EdgeDescriptor, OperatorDescriptor, OperatorKind,
};
use edge_eta::heat::{
    fit_expansion, log_grid, mellin_check, min_time, power_template, sample_traces, MellinOptions,
    TraceFunction,
};
use edge_eta::index::{
    geometric_vanishing, heat_trace_family, int, rat, validate, IndexSet, Parity, Rational,
    Skeleton, TraceKind,
};
use edge_eta::special::bessel_j_zero;
use edge_eta::spectra::{
    circle_dirac_spectrum, sphere_dirac_spectrum, spin_cone_heat_kernel, unit_disk_spectrum,
    DirectZeros, Spectrum, SpinSign,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Check = Result<String, String>;
/// Name, time budget in seconds, check.
type Criterion = (&'static str, f64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const PARITIES: [Parity; 2] = [Parity::Even, Parity::Odd];
const GEOMETRIC: [OperatorKind; 4] = [
    OperatorKind::GaussBonnet,
    OperatorKind::Signature,
    OperatorKind::OddSignature,
    OperatorKind::SpinDirac,
];

/// `(m, b)` with `m ≤ 8` and `1 ≤ b ≤ m − 2`.
fn grid() -> Vec<(u32, u32)> {
    (3..=8u32)
        .flat_map(|m| (1..=m - 2).map(move |b| (m, b)))
        .collect()
}

// ---------------------------------------------------------------- 1

/// `{origin + ℓ}` below `cap`.
fn ladder(origin: Rational, cap: Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut x = origin;
    while x < cap {
        out.push(x);
        x += int(1);
    }
    out
}

/// Closed-form expansion: interior `ℓ − m/2`, edge `ℓ − b/2` (odd trace of
/// an odd operator: `ℓ − (b+1)/2`), with `log t` on the edge ladder at
/// `ℓ ∈ I` (even case, and the plain trace) or `ℓ ∉ I` (odd case), where
/// `I = ℕ₀` if `m − b` is even and empty otherwise.
fn closed_form(m: u32, b: u32, parity: Parity, kind: TraceKind) -> BTreeSet<(Rational, u32)> {
    let cap = int(4);
    let odd_case = kind == TraceKind::OddTrace && parity == Parity::Odd;
    let edge_origin = if odd_case {
        rat(-(b as i64) - 1, 2)
    } else {
        rat(-(b as i64), 2)
    };
    let i_is_all = (m - b).is_multiple_of(2);
    let logs = if odd_case { !i_is_all } else { i_is_all };
    let mut out = BTreeSet::new();
    for g in ladder(rat(-(m as i64), 2), cap) {
        out.insert((g, 0));
    }
    for g in ladder(edge_origin, cap) {
        out.insert((g, 0));
        if logs {
            out.insert((g, 1));
        }
    }
    out
}

fn criterion_1() -> Check {
    let mut n = 0;
    for (m, b) in grid() {
        for parity in PARITIES {
            for kind in [TraceKind::Trace, TraceKind::OddTrace] {
                let skel =
                    heat_trace_family(m, b, m - b - 1, parity, kind).map_err(|e| e.to_string())?;
                let got: BTreeSet<_> = skel.terms().into_iter().collect();
                let want = closed_form(m, b, parity, kind);
                ensure(got == want, || {
                    format!("m={m} b={b} {parity} {kind}: got {got:?}, want {want:?}")
                })?;
                ensure(validate(&skel.combined).valid, || {
                    format!("m={m} b={b}: invalid set")
                })?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} skeletons match below cap 4"))
}

// ---------------------------------------------------------------- 2

/// The four alternatives for an even or odd operator, taken literally and
/// resolved from the most specific: double pole, then well-defined or
/// interior-only, then interior and edge.
fn expected_verdict(m: u32, b: u32, parity: Parity) -> Result<Verdict, String> {
    let d_even = parity == Parity::Even;
    let same_parity = d_even == b.is_multiple_of(2);
    let mb_even = (m - b).is_multiple_of(2);
    let b_even = b.is_multiple_of(2);
    let i = m.is_multiple_of(2) && same_parity;
    let ii = m % 2 == 1 && same_parity;
    let iii = (d_even && (!mb_even || b_even)) || (!d_even && (mb_even || !b_even));
    let iv = (d_even && mb_even && !b_even) || (!d_even && !mb_even && b_even);
    Ok(if iv {
        Verdict::PossibleDoublePole
    } else if i {
        Verdict::WellDefined
    } else if ii {
        Verdict::ResidueInteriorOnly
    } else if iii {
        Verdict::ResidueInteriorAndEdge
    } else {
        return Err(format!("m={m} b={b} {parity}: no alternative applies"));
    })
}

fn edge_space(m: u32, bs: &[u32]) -> EdgeDescriptor {
    let edges: Vec<(u32, u32)> = bs.iter().map(|&b| (b, m - b - 1)).collect();
    EdgeDescriptor::with_edges(m, &edges)
}

/// Edge lists with at most two strata, each `1 ≤ b ≤ m − 2`.
fn edge_lists(m: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    if m < 3 {
        return out;
    }
    for b1 in 1..=m - 2 {
        out.push(vec![b1]);
        for b2 in b1..=m - 2 {
            out.push(vec![b1, b2]);
        }
    }
    out
}

fn criterion_2() -> Check {
    let mut n = 0;
    for (m, b) in grid() {
        let space = edge_space(m, &[b]);
        for parity in PARITIES {
            let status = classify_eta(&space, &OperatorDescriptor::custom(parity))
                .map_err(|e| e.to_string())?;
            let want = expected_verdict(m, b, parity)?;
            ensure(
                status.verdict == want && status.strata[0].verdict == want,
                || {
                    format!(
                        "m={m} b={b} {parity}: got {:?}, want {want:?}",
                        status.verdict
                    )
                },
            )?;
            n += 1;
        }
        for kind in GEOMETRIC {
            let op = OperatorDescriptor::new(kind);
            if op.validate(m).is_err() {
                continue;
            }
            let v = classify_eta(&space, &op)
                .map_err(|e| e.to_string())?
                .verdict;
            let has_parity = operator_parity(&op, m, b)
                .map_err(|e| e.to_string())?
                .as_parity()
                .is_some();
            let ok = if m % 2 == 0 {
                // spectral symmetry needs no parity
                v == Verdict::IdenticallyZero
            } else if has_parity {
                // at most a simple pole, with residue from the edge alone
                matches!(v, Verdict::WellDefined | Verdict::ResidueInteriorAndEdge)
            } else {
                // the odd-dimensional statement rests on an even/odd expansion
                v == Verdict::Unclassified
            };
            ensure(ok, || format!("m={m} b={b} {kind:?}: {v:?}"))?;
            n += 1;
        }
    }
    // bounding spaces X of dimension m + 1 = xm
    for xm in 3..=8u32 {
        for bs in edge_lists(xm) {
            let x = edge_space(xm, &bs);
            let want = bs.iter().all(|&b| (xm - b) % 2 == 1 || b % 2 == 1);
            let got = classify_boundary_case(&x)
                .map_err(|e| e.to_string())?
                .exists;
            ensure(got == want, || {
                format!("X dim {xm}, edges {bs:?}: got {got}, want {want}")
            })?;
            n += 1;
        }
    }
    // cones over M of dimension m: X = C(M) has edges of dimension b + 1
    for m in 2..=7u32 {
        for bs in edge_lists(m) {
            let x = cone_over(&edge_space(m, &bs)).map_err(|e| e.to_string())?;
            let want = bs.iter().all(|&b| (m - b) % 2 == 1 || b % 2 == 0);
            let report = classify_boundary_case(&x).map_err(|e| e.to_string())?;
            ensure(
                report.exists == want && report.exempt_cone_points >= 1,
                || format!("cone over m={m}, edges {bs:?}: {report:?}"),
            )?;
            n += 1;
        }
    }
    Ok(format!("{n} grid points agree"))
}

// ---------------------------------------------------------------- 3

fn verdict_from(skel: &Skeleton) -> Verdict {
    let half = rat(-1, 2);
    if skel.vanishes_identically {
        Verdict::IdenticallyZero
    } else if skel.combined.log_power(half).is_some_and(|p| p >= 1) {
        Verdict::PossibleDoublePole
    } else if skel.edge.contains(half, 0) {
        Verdict::ResidueInteriorAndEdge
    } else if skel.interior.contains(half, 0) {
        Verdict::ResidueInteriorOnly
    } else {
        Verdict::WellDefined
    }
}

fn criterion_3() -> Check {
    let (mut n, mut skipped) = (0, 0);
    for (m, b) in grid() {
        let space = edge_space(m, &[b]);
        let f = m - b - 1;
        for parity in PARITIES {
            let skel = heat_trace_family(m, b, f, parity, TraceKind::OddTrace)
                .map_err(|e| e.to_string())?;
            let got = classify_eta(&space, &OperatorDescriptor::custom(parity))
                .map_err(|e| e.to_string())?
                .verdict;
            let want = verdict_from(&skel);
            ensure(got == want, || {
                format!("m={m} b={b} {parity}: {got:?} vs skeleton {want:?}")
            })?;
            n += 1;
        }
        for kind in GEOMETRIC {
            let op = OperatorDescriptor::new(kind);
            if op.validate(m).is_err() {
                continue;
            }
            // without a parity there is no skeleton to compare against
            let Some(parity) = operator_parity(&op, m, b)
                .map_err(|e| e.to_string())?
                .as_parity()
            else {
                skipped += 1;
                continue;
            };
            let skel = heat_trace_family(m, b, f, parity, TraceKind::OddTrace)
                .map_err(|e| e.to_string())?;
            let refined = geometric_vanishing(&skel, kind).map_err(|e| e.to_string())?;
            let got = classify_eta(&space, &op)
                .map_err(|e| e.to_string())?
                .verdict;
            let want = verdict_from(&refined);
            ensure(got == want, || {
                format!("m={m} b={b} {kind:?}: {got:?} vs skeleton {want:?}")
            })?;
            n += 1;
        }
    }
    Ok(format!(
        "{n} verdicts agree with the t^-1/2 entries ({skipped} parity-free geometric points have no skeleton)"
    ))
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Check {
    let opts = EtaOptions::default();
    let mut worst: f64 = 0.0;
    for a in [0.1, 0.25, 0.4, 0.49] {
        let mut c = circle_dirac_spectrum(a, 200.0).map_err(|e| e.to_string())?;
        // force the heat-kernel route
        c.lattice = None;
        let e = eta_numeric(&c, &circle_skeleton(), &opts).map_err(|e| e.to_string())?;
        let v = e.value.ok_or_else(|| format!("a={a}: pole reported"))?;
        let err = (v - (1.0 - 2.0 * a)).abs();
        ensure(err < 1e-6, || format!("a={a}: eta {v}, error {err:e}"))?;
        worst = worst.max(err);
    }
    let mut half = circle_dirac_spectrum(0.5, 200.0).map_err(|e| e.to_string())?;
    half.lattice = None;
    for (name, s) in [
        ("circle a=1/2", half),
        (
            "sphere S^3",
            sphere_dirac_spectrum(3, 40.0).map_err(|e| e.to_string())?,
        ),
        (
            "finite",
            Spectrum::finite(&[(1.5, 4), (-1.5, 4), (0.2, 1), (-0.2, 1)], 2),
        ),
    ] {
        let e = eta_numeric(&s, &circle_skeleton(), &opts).map_err(|e| e.to_string())?;
        ensure(e.value == Some(0.0), || format!("{name}: {:?}", e.value))?;
    }
    Ok(format!(
        "max |eta - (1-2a)| = {worst:.2e}; symmetric spectra give 0"
    ))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Check {
    let aps = rho_aps(0.25, 0.75).map_err(|e| e.to_string())?.value;
    let cg = rho_cheeger_gromov_model(0.25)
        .map_err(|e| e.to_string())?
        .value;
    ensure((aps - 1.0).abs() <= 2e-6, || format!("rho_APS = {aps}"))?;
    ensure((cg + 0.5).abs() <= 1e-6, || format!("rho_CG = {cg}"))?;
    Ok(format!("rho_APS = {aps:.12}, rho_CG = {cg:.12}"))
}

// ---------------------------------------------------------------- 6

const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;

fn criterion_6() -> Check {
    let mut worst: f64 = 0.0;
    for a in [0.1, 0.25, 0.4] {
        let c = circle_dirac_spectrum(a, 200.0).map_err(|e| e.to_string())?;
        for s in [0.5, 1.0, 1.5] {
            let r = mellin_check(&c, s, MellinOptions::default()).map_err(|e| e.to_string())?;
            ensure(r.difference.abs() < 1e-4, || format!("a={a} s={s}: {r:?}"))?;
            worst = worst.max(r.difference.abs());
            if a == 0.25 && s == 1.0 {
                ensure((r.rhs + 4.0 * CATALAN).abs() < 1e-10, || {
                    format!("rhs {} vs -4G = {}", r.rhs, -4.0 * CATALAN)
                })?;
            }
        }
    }
    Ok(format!("max |lhs - rhs| = {worst:.2e}; rhs(1/4, 1) = -4G"))
}

// ---------------------------------------------------------------- 7

/// `J_0` from its power series, accurate to rounding for `x ≤ 4`.
fn j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_7() -> Check {
    for k in 1..=10u64 {
        let j = bessel_j_zero(0.5, k).map_err(|e| e.to_string())?.value;
        ensure((j - k as f64 * PI).abs() <= 1e-12, || {
            format!("j_(1/2,{k}) = {j}")
        })?;
    }
    let j01 = bessel_j_zero(0.0, 1).map_err(|e| e.to_string())?.value;
    let oracle = bisect(j0_series, 2.0, 3.0);
    ensure((j01 - oracle).abs() <= 1e-12, || {
        format!("j_(0,1) = {j01}, bisection {oracle}")
    })?;
    ensure((oracle - 2.404825557695773).abs() <= 1e-12, || {
        format!("bisection gave {oracle}")
    })?;

    // Laplace eigenvalues j² up to 10⁴, i.e. j ≤ 100
    let disk = unit_disk_spectrum(100.0, &DirectZeros).map_err(|e| e.to_string())?;
    let grid = log_grid(min_time(&disk), 0.1, 40);
    let samples = sample_traces(&disk, &grid, TraceFunction::Heat).map_err(|e| e.to_string())?;
    let template = power_template(&[rat(-1, 1), rat(-1, 2), int(0), rat(1, 2)]);
    let model = fit_expansion(&samples, &template).map_err(|e| e.to_string())?;
    let lead = model.coefficient(rat(-1, 1), 0).ok_or("no t^-1 term")?;
    ensure((lead - 0.25).abs() <= 0.0025, || {
        format!("leading coefficient {lead}")
    })?;
    let weyl = disk.count_below(100.0) as f64 / 1e4;
    ensure((weyl - 0.25).abs() <= 0.05 * 0.25, || {
        format!("N(10^4)/10^4 = {weyl}")
    })?;
    Ok(format!(
        "j_(0,1) - oracle = {:.1e}; disk t^-1 coefficient {lead:.6}; N/Lambda = {weyl:.4}",
        j01 - oracle
    ))
}

// ---------------------------------------------------------------- 8

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton's method.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn composite_gl(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            rule.iter()
                .map(|&(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

fn criterion_8() -> Check {
    // (μ, sign, f, t, t', s, s̃)
    let points = [
        (0.5, SpinSign::Plus, 1u32, 0.5, 0.5, 1.0, 1.0),
        (1.5, SpinSign::Minus, 2, 0.3, 0.7, 0.8, 1.2),
        (-1.0, SpinSign::Plus, 3, 0.25, 0.4, 1.0, 0.6),
    ];
    let mut worst: f64 = 0.0;
    for (mu, sign, f, t, tp, s, st) in points {
        let k = |tt: f64, x: f64, y: f64| spin_cone_heat_kernel(mu, sign, f, tt, x, y);
        let mut failure = None;
        let lhs = composite_gl(
            |r| match (k(t, s, r), k(tp, r, st)) {
                (Ok(a), Ok(b)) => a * b * r.powi(f as i32),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e.to_string());
                    f64::NAN
                }
            },
            0.0,
            20.0,
            400,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let rhs = k(t + tp, s, st).map_err(|e| e.to_string())?;
        let err = (lhs - rhs).abs();
        ensure(err < 1e-8, || format!("mu={mu} f={f}: {lhs} vs {rhs}"))?;
        worst = worst.max(err);
    }
    Ok(format!("3 points, max deviation {worst:.1e}"))
}

// ---------------------------------------------------------------- 9

type Generators = Vec<(Rational, u32)>;

/// Log-closed generators with exponents in `¼ℤ`, at most 12 of them.
fn generator_strategy() -> impl Strategy<Value = Generators> {
    proptest::collection::vec((-12i64..12, 0u32..3), 0..=4).prop_map(|raw| {
        raw.into_iter()
            .flat_map(|(q, p)| (0..=p).map(move |k| (rat(q, 4), k)))
            .take(12)
            .collect()
    })
}

/// The set generated by `gens` under unit translation, below `cap`.
fn enumerate(gens: &Generators, cap: Rational) -> BTreeSet<(Rational, u32)> {
    let mut out = BTreeSet::new();
    for &(g, p) in gens {
        for x in ladder(g, cap) {
            out.insert((x, p));
        }
    }
    out
}

fn criterion_9() -> Check {
    let mut runner = TestRunner::deterministic();
    let strategy = (generator_strategy(), generator_strategy(), 1i64..=6);
    for case in 0..200 {
        let (ga, gb, cap) = strategy
            .new_tree(&mut runner)
            .map_err(|e| e.to_string())?
            .current();
        let cap = int(cap);
        let a = IndexSet::generated(&ga, cap).map_err(|e| e.to_string())?;
        let b = IndexSet::generated(&gb, cap).map_err(|e| e.to_string())?;
        let (pa, pb) = (enumerate(&ga, cap), enumerate(&gb, cap));
        let mut want: BTreeSet<_> = pa.union(&pb).copied().collect();
        for &(z, p) in &pa {
            for &(w, q) in &pb {
                if z == w {
                    want.insert((z, p + q + 1));
                }
            }
        }
        let u = a.extended_union(&b).map_err(|e| e.to_string())?;
        let got: BTreeSet<_> = u.points().into_iter().collect();
        ensure(got == want, || {
            format!("case {case}: A={ga:?} B={gb:?} cap={cap}")
        })?;
        ensure(validate(&u).valid, || {
            format!("case {case}: invalid result")
        })?;
    }
    Ok("200 random pairs match enumeration".into())
}

// ----------------------------------------------------------------

fn main() {
    let criteria: [Criterion; 9] = [
        ("expansion structure", 1.0, criterion_1),
        ("classification table", 1.0, criterion_2),
        ("classification vs skeleton", 1.0, criterion_3),
        ("eta oracle", 10.0, criterion_4),
        ("rho values", 1.0, criterion_5),
        ("Mellin identity", 30.0, criterion_6),
        ("model cone spectra", 60.0, criterion_7),
        ("spin kernel semigroup", 10.0, criterion_8),
        ("extended union brute force", 1.0, criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Ok(d) if secs < *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("over the {budget} s budget; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} [{}] {name:<28} {secs:>8.3} s (budget {budget} s)  {detail}",
            i + 1
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
