//! Eta invariants (exact for shifted lattices, by heat-trace continuation
//! otherwise), APS rho invariants and the flat Cheeger–Gromov model.

use crate::heat::{
    fit_expansion, log_grid, min_time, pole_structure, power_log_integral, sample_traces,
    template_from_skeleton, ExpansionModel, HeatError, PoleStructure, Slot, TraceFunction,
};
use crate::index::{smooth_skeleton, Rational, Skeleton, TraceKind, DEFAULT_CAP};
use crate::special::{erfc, hurwitz_zeta_difference, RealEval, SpecialError};
use crate::spectra::{rational_to_f64, Spectrum};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EtaError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Heat(#[from] HeatError),
    #[error("eta series does not converge at s = {s}: {reason}")]
    NotConvergent { s: f64, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaMethod {
    HurwitzExact,
    HeatContinuation,
    Symmetry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaResult {
    /// Absent when `η(D, s)` has a pole at `s = 0`.
    pub value: Option<f64>,
    pub method: EtaMethod,
    pub error_bound: f64,
    pub regular: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<PoleStructure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ExpansionModel>,
}

impl EtaResult {
    fn exact(value: f64, error_bound: f64, method: EtaMethod) -> Self {
        Self {
            value: Some(value),
            method,
            error_bound,
            regular: true,
            pole: None,
            model: None,
        }
    }
}

/// `η` of `{n + a : n ∈ ℤ}`: `ζ_H(0, a) − ζ_H(0, 1−a) = 1 − 2a`.
pub fn eta_lattice(a: f64) -> Result<EtaResult, EtaError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(EtaError::Domain(format!(
            "offset must lie in (0, 1), got {a}"
        )));
    }
    let d = hurwitz_zeta_difference(0.0, a, 1.0 - a)?;
    Ok(EtaResult::exact(
        d.value,
        d.abs_error_bound,
        EtaMethod::HurwitzExact,
    ))
}

/// `η(D, s) = Σ sign(λ) |λ|^{−s}` where the series or its Hurwitz
/// continuation is available: exactly for lattice spectra, by direct
/// summation for finite spectra, and with a Weyl tail bound when
/// `s` exceeds the counting exponent.
pub fn eta_function(spec: &Spectrum, s: f64) -> Result<RealEval, EtaError> {
    if spec.is_symmetric() && spec.lattice.is_none() {
        return Ok(RealEval::exact(0.0));
    }
    if let Some(l) = spec.lattice {
        if l.offset == 0.0 || l.offset == 0.5 {
            return Ok(RealEval::exact(0.0));
        }
        let d = hurwitz_zeta_difference(s, l.offset, 1.0 - l.offset)?;
        let f = l.scale.powf(-s);
        return Ok(RealEval::new(f * d.value, f * d.abs_error_bound));
    }
    let mut sum = 0.0;
    let mut mag = 0.0;
    for g in spec.abs_groups().iter().rev() {
        let net = g.net();
        if net != 0 {
            let term = net as f64 * g.abs.powf(-s);
            sum += term;
            mag += term.abs();
        }
    }
    let rounding = 4.0 * f64::EPSILON * mag;
    if spec.is_complete() {
        return Ok(RealEval::new(sum, rounding));
    }
    let tail = spec
        .effective_tail()
        .ok_or_else(|| EtaError::NotConvergent {
            s,
            reason: "no tail model".into(),
        })?;
    let bound = tail
        .dirichlet_bound(spec.cutoff, s)
        .ok_or_else(|| EtaError::NotConvergent {
            s,
            reason: format!("s must exceed the counting exponent {}", tail.weyl_power),
        })?;
    Ok(RealEval::new(sum, bound + rounding))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaOptions {
    /// Requested lower end of the fit window; raised to the smallest time
    /// the cutoff supports.
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
    /// Number of template slots taken from the skeleton.
    pub max_terms: usize,
    /// A `t^{−1/2}` coefficient above `pole_tol · max(1, data scale)`
    /// counts as a pole.
    pub pole_tol: f64,
}

impl Default for EtaOptions {
    fn default() -> Self {
        Self {
            t_min: 1e-4,
            t_max: 1e-1,
            points_per_decade: 40,
            max_terms: 4,
            pole_tol: 1e-6,
        }
    }
}

/// Default skeleton for a one-dimensional smooth operator.
pub fn circle_skeleton() -> Skeleton {
    smooth_skeleton(1, TraceKind::OddTrace, Ratio::from_integer(DEFAULT_CAP))
}

/// `η(D) = π^{−1/2} ∫₀^∞ t^{−1/2} Tr D e^{−tD²} dt`, continued to `s = 0`.
///
/// Below `t₀` (the fit window's lower end) the trace is replaced by the
/// fitted expansion, integrated in closed form (continued through
/// negative powers); above `t₀` each eigenvalue contributes
/// `sign(λ) erfc(|λ|√t₀)` exactly.
pub fn eta_numeric(
    spec: &Spectrum,
    skeleton: &Skeleton,
    opts: &EtaOptions,
) -> Result<EtaResult, EtaError> {
    if spec.is_symmetric() {
        return Ok(EtaResult::exact(0.0, 0.0, EtaMethod::Symmetry));
    }
    let t0 = opts.t_min.max(min_time(spec));
    let t1 = opts.t_max.max(10.0 * t0);
    let grid = log_grid(t0, t1, opts.points_per_decade);
    let samples = sample_traces(spec, &grid, TraceFunction::OddHeat)?;
    let template: Vec<Slot> = template_from_skeleton(skeleton, opts.max_terms);
    let model = fit_expansion(&samples, &template)?;
    let pole_threshold = opts.pole_tol * model.data_scale.max(1.0);
    let half = Ratio::new(-1, 2);
    let singular = model
        .terms
        .iter()
        .filter(|f| f.slot.exponent == half)
        .any(|f| f.coefficient.abs() > pole_threshold);
    if singular {
        return Ok(EtaResult {
            value: None,
            method: EtaMethod::HeatContinuation,
            error_bound: f64::INFINITY,
            regular: false,
            pole: Some(pole_structure(&model)),
            model: Some(model),
        });
    }
    let sqrt_pi = PI.sqrt();
    let mut small = 0.0;
    let mut err = 0.0;
    for term in model.terms.iter().filter(|f| f.slot.exponent != half) {
        let beta = rational_to_f64(term.slot.exponent) + 0.5;
        let j = power_log_integral(beta, term.slot.log_power, t0);
        small += term.coefficient * j / sqrt_pi;
        err += (term.std_error * j).abs() / sqrt_pi;
    }
    let rt = t0.sqrt();
    let mut large = 0.0;
    let mut mag = 0.0;
    for g in spec.abs_groups().iter().rev() {
        let net = g.net();
        if net != 0 {
            let term = net as f64 * erfc(g.abs * rt).value;
            large += term;
            mag += term.abs();
        }
    }
    err += 4.0 * f64::EPSILON * mag;
    if !spec.is_complete() {
        let tail = spec.effective_tail().ok_or(HeatError::TailUnbounded {
            t: t0,
            t_min: min_time(spec),
            cutoff: spec.cutoff,
        })?;
        // erfc(x) ≤ e^{−x²}
        err += tail.heat_bound(spec.cutoff, t0);
        // trace samples are off by at most their truncation bound; below t₀
        // that enters through ∫₀^{t₀} t^{−1/2} dt = 2√t₀
        err += samples
            .iter()
            .map(|s| s.truncation_bound)
            .fold(0.0, f64::max)
            * 2.0
            * t0.sqrt()
            / sqrt_pi;
    }
    Ok(EtaResult {
        value: Some(small + large),
        method: EtaMethod::HeatContinuation,
        error_bound: err,
        regular: true,
        pole: None,
        model: Some(model),
    })
}

/// Exact eta for lattice spectra, heat continuation otherwise.
pub fn eta_auto(
    spec: &Spectrum,
    skeleton: &Skeleton,
    opts: &EtaOptions,
) -> Result<EtaResult, EtaError> {
    match spec.lattice {
        Some(l) if l.offset == 0.0 || l.offset == 0.5 => {
            Ok(EtaResult::exact(0.0, 0.0, EtaMethod::Symmetry))
        }
        Some(l) => eta_lattice(l.offset),
        None => eta_numeric(spec, skeleton, opts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhoFlavor {
    #[serde(rename = "APS")]
    Aps,
    CheegerGromov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoResult {
    pub value: f64,
    pub error_bound: f64,
    pub flavor: RhoFlavor,
    pub components: (f64, f64),
}

/// `ρ = η(D_a) − η(D_b)` for circle operators twisted by holonomies
/// `e^{2πia}`, `e^{2πib}`: `2(b − a)`.
pub fn rho_aps(a: f64, b: f64) -> Result<RhoResult, EtaError> {
    let (ea, eb) = rayon::join(|| eta_lattice(a), || eta_lattice(b));
    let (ea, eb) = (ea?, eb?);
    let (va, vb) = (
        ea.value.expect("lattice eta is regular"),
        eb.value.expect("lattice eta is regular"),
    );
    Ok(RhoResult {
        value: va - vb,
        error_bound: ea.error_bound + eb.error_bound + f64::EPSILON * (va.abs() + vb.abs()),
        flavor: RhoFlavor::Aps,
        components: (va, vb),
    })
}

/// `(∂_x e^{−tΔ_ℝ})(x, y)` at `y = x`: the diagonal of the Schwartz kernel
/// of `D̃ e^{−tD̃²}` (up to the factor `−i`) on the line.
pub fn line_odd_kernel_diagonal(t: f64, x: f64) -> f64 {
    let y = x;
    let d = x - y;
    // `+ 0.0` turns the `−0.0` of the odd factor into `0.0`
    -d / (2.0 * t) * (-(d * d) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt() + 0.0
}

/// `ρ_Γ = η_Γ(D̃) − η(D)` for the ℤ-cover `ℝ → S¹` with `D = −i d/dθ + a`.
/// The lift is translation invariant with vanishing odd diagonal kernel,
/// so `η_Γ(D̃) = 0`.
pub fn rho_cheeger_gromov_model(a: f64) -> Result<RhoResult, EtaError> {
    let eta_gamma = line_odd_kernel_diagonal(1.0, 0.0);
    let e = if a == 0.5 {
        EtaResult::exact(0.0, 0.0, EtaMethod::Symmetry)
    } else {
        eta_lattice(a)?
    };
    let v = e.value.expect("lattice eta is regular");
    Ok(RhoResult {
        value: eta_gamma - v,
        error_bound: e.error_bound,
        flavor: RhoFlavor::CheegerGromov,
        components: (eta_gamma, v),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub before: RhoResult,
    pub after: RhoResult,
    pub invariant: bool,
}

fn rho_of_pair(
    pair: (&Spectrum, &Spectrum),
    skeleton: &Skeleton,
    opts: &EtaOptions,
) -> Result<RhoResult, EtaError> {
    let (ea, eb) = rayon::join(
        || eta_auto(pair.0, skeleton, opts),
        || eta_auto(pair.1, skeleton, opts),
    );
    let (ea, eb) = (ea?, eb?);
    let (Some(va), Some(vb)) = (ea.value, eb.value) else {
        return Err(EtaError::Domain(
            "an eta invariant in the pair has a pole".into(),
        ));
    };
    Ok(RhoResult {
        value: va - vb,
        error_bound: ea.error_bound + eb.error_bound,
        flavor: RhoFlavor::Aps,
        components: (va, vb),
    })
}

/// Whether two spectrum pairs give the same rho invariant within their
/// combined error bounds.
pub fn rho_invariance_check(
    before: (&Spectrum, &Spectrum),
    after: (&Spectrum, &Spectrum),
    skeleton: &Skeleton,
    opts: &EtaOptions,
) -> Result<InvarianceReport, EtaError> {
    let rb = rho_of_pair(before, skeleton, opts)?;
    let ra = rho_of_pair(after, skeleton, opts)?;
    let slack =
        rb.error_bound + ra.error_bound + 4.0 * f64::EPSILON * (rb.value.abs() + ra.value.abs());
    Ok(InvarianceReport {
        invariant: (rb.value - ra.value).abs() <= slack,
        before: rb,
        after: ra,
    })
}

/// Exponent `γ` as a rational, for callers building templates by hand.
pub fn slot(exponent: (i64, i64), log_power: u32) -> Slot {
    Slot::new(Rational::new(exponent.0, exponent.1), log_power)
}
