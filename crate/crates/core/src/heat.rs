//! Heat traces of spectra, short-time expansion fits with log detection,
//! the APS cylinder term `K(t)` and the Mellin identity linking it to
//! `η(D, 2s)`.

use crate::eta::{eta_function, EtaError};
use crate::index::{fmt_rational, Rational, Skeleton};
use crate::quad::{integrate, integrate_to_infinity, QuadError, QuadOptions};
use crate::special::{erfc, gamma};
use crate::spectra::{rational_to_f64, Spectrum};
use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Sampling requires `cutoff² · t ≥ TAIL_EXPONENT`, so the Gaussian tail
/// beyond the cutoff is below `e^{−25}`.
pub const TAIL_EXPONENT: f64 = 25.0;
/// Fits with a larger condition estimate are refused.
pub const MAX_CONDITION: f64 = 1e8;
/// Residual improvement needed before a log term is declared present.
pub const LOG_IMPROVEMENT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeatError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("t = {t:e} is below {t_min:e}, the smallest time the cutoff {cutoff} supports")]
    TailUnbounded { t: f64, t_min: f64, cutoff: f64 },
    #[error("fit is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("{got} samples for {terms} template terms, need at least {needed}")]
    InsufficientSamples {
        got: usize,
        terms: usize,
        needed: usize,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Eta(#[from] Box<EtaError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub value: f64,
    pub truncation_bound: f64,
}

/// Smallest `t` at which traces of `spec` are computed.
pub fn min_time(spec: &Spectrum) -> f64 {
    if spec.is_complete() {
        0.0
    } else {
        TAIL_EXPONENT / (spec.cutoff * spec.cutoff)
    }
}

fn check_time(spec: &Spectrum, t: f64) -> Result<(), HeatError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(HeatError::Domain(format!(
            "t must be positive and finite, got {t}"
        )));
    }
    let t_min = min_time(spec);
    if t < t_min {
        return Err(HeatError::TailUnbounded {
            t,
            t_min,
            cutoff: spec.cutoff,
        });
    }
    Ok(())
}

fn heat_tail(spec: &Spectrum, t: f64) -> Result<f64, HeatError> {
    if spec.is_complete() {
        return Ok(0.0);
    }
    match spec.effective_tail() {
        Some(tail) => Ok(tail.heat_bound(spec.cutoff, t)),
        None => Err(HeatError::TailUnbounded {
            t,
            t_min: min_time(spec),
            cutoff: spec.cutoff,
        }),
    }
}

/// `Tr e^{−tD²} = h + Σ mult · e^{−tλ²}`.
pub fn heat_trace(spec: &Spectrum, t: f64) -> Result<TraceSample, HeatError> {
    check_time(spec, t)?;
    // summed from the largest |λ| down to limit rounding
    let sum: f64 = spec
        .entries
        .iter()
        .rev()
        .map(|e| e.multiplicity as f64 * (-t * e.lambda * e.lambda).exp())
        .sum();
    let value = spec.kernel_dim as f64 + sum;
    let rounding = 2.0 * f64::EPSILON * spec.entries.len() as f64 * sum.abs();
    Ok(TraceSample {
        t,
        value,
        truncation_bound: heat_tail(spec, t)? + rounding,
    })
}

/// `Tr D e^{−tD²} = Σ mult · λ · e^{−tλ²}`. Eigenvalues `±λ` are paired
/// before summation, so a symmetric spectrum gives exactly zero.
pub fn odd_heat_trace(spec: &Spectrum, t: f64) -> Result<TraceSample, HeatError> {
    check_time(spec, t)?;
    let groups = spec.abs_groups();
    let mut sum = 0.0;
    let mut mag = 0.0;
    for g in groups.iter().rev() {
        let net = g.net();
        if net != 0 {
            let term = net as f64 * g.abs * (-t * g.abs * g.abs).exp();
            sum += term;
            mag += term.abs();
        }
    }
    let tail = if spec.is_complete() {
        0.0
    } else {
        match spec.effective_tail() {
            Some(tail) => tail.odd_bound(spec.cutoff, t),
            None => {
                return Err(HeatError::TailUnbounded {
                    t,
                    t_min: min_time(spec),
                    cutoff: spec.cutoff,
                })
            }
        }
    };
    Ok(TraceSample {
        t,
        value: sum,
        truncation_bound: tail + 2.0 * f64::EPSILON * groups.len() as f64 * mag,
    })
}

/// `K(t) = −½ Σ mult · sign(λ) · erfc(|λ|√t) − h/2`.
pub fn aps_k(spec: &Spectrum, t: f64) -> TraceSample {
    let (value, bound) = k_shifted(spec, t);
    TraceSample {
        t,
        value: value - spec.kernel_dim as f64 / 2.0,
        truncation_bound: bound,
    }
}

/// `K(t) + h/2` and a bound on what truncation omits.
fn k_shifted(spec: &Spectrum, t: f64) -> (f64, f64) {
    let rt = t.sqrt();
    let mut sum = 0.0;
    for g in spec.abs_groups().iter().rev() {
        let net = g.net();
        if net != 0 {
            sum += net as f64 * erfc(g.abs * rt).value;
        }
    }
    let bound = if spec.is_complete() {
        0.0
    } else {
        // erfc(x) ≤ e^{−x²}
        spec.effective_tail()
            .map_or(f64::INFINITY, |tail| 0.5 * tail.heat_bound(spec.cutoff, t))
    };
    (-0.5 * sum, bound)
}

/// `points_per_decade` log-spaced times covering `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, points_per_decade: usize) -> Vec<f64> {
    let decades = (t_max / t_min).log10();
    let n = ((decades * points_per_decade as f64).round() as usize).max(1);
    (0..=n)
        .map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceFunction {
    Heat,
    OddHeat,
}

/// Evaluates a trace on every grid point in parallel.
pub fn sample_traces(
    spec: &Spectrum,
    grid: &[f64],
    which: TraceFunction,
) -> Result<Vec<TraceSample>, HeatError> {
    grid.par_iter()
        .map(|&t| match which {
            TraceFunction::Heat => heat_trace(spec, t),
            TraceFunction::OddHeat => odd_heat_trace(spec, t),
        })
        .collect()
}

/// One basis function `t^exponent (log t)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    #[serde(with = "rational_text")]
    pub exponent: Rational,
    pub log_power: u32,
}

impl Slot {
    pub fn new(exponent: Rational, log_power: u32) -> Self {
        Self {
            exponent,
            log_power,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        t.powf(rational_to_f64(self.exponent)) * t.ln().powi(self.log_power as i32)
    }
}

mod rational_text {
    use crate::geometry::parse_rational;
    use crate::index::{fmt_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// The first `max_terms` slots of a skeleton (each log power is its own slot).
pub fn template_from_skeleton(skel: &Skeleton, max_terms: usize) -> Vec<Slot> {
    let mut out: Vec<Slot> = skel
        .terms()
        .into_iter()
        .map(|(g, p)| Slot::new(g, p))
        .collect();
    out.sort();
    out.dedup();
    out.truncate(max_terms);
    out
}

/// Slots `t^γ` without logs.
pub fn power_template(exponents: &[Rational]) -> Vec<Slot> {
    let mut out: Vec<Slot> = exponents.iter().map(|&g| Slot::new(g, 0)).collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitTerm {
    #[serde(flatten)]
    pub slot: Slot,
    pub coefficient: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionModel {
    pub terms: Vec<FitTerm>,
    /// Root-mean-square residual of the weighted system.
    pub residual_norm: f64,
    pub condition_estimate: f64,
    /// Rows are weighted by `t^{−weight_exponent}` (the leading exponent).
    #[serde(with = "rational_text")]
    pub weight_exponent: Rational,
    /// Largest weighted sample magnitude, the scale of the fitted data.
    pub data_scale: f64,
}

impl ExpansionModel {
    pub fn coefficient(&self, exponent: Rational, log_power: u32) -> Option<f64> {
        self.terms
            .iter()
            .find(|f| f.slot == Slot::new(exponent, log_power))
            .map(|f| f.coefficient)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|f| f.coefficient * f.slot.eval(t))
            .sum()
    }
}

/// Weighted least squares on `{t^α (log t)^p}`. Rows are scaled by
/// `t^{−α_min}` so every sample carries comparable weight, columns are
/// normalized, and the solve goes through an SVD whose singular values
/// give the condition estimate.
pub fn fit_expansion(
    samples: &[TraceSample],
    template: &[Slot],
) -> Result<ExpansionModel, HeatError> {
    let k = template.len();
    if k == 0 {
        return Err(HeatError::Domain("empty template".into()));
    }
    let mut slots = template.to_vec();
    slots.sort();
    if slots.windows(2).any(|w| w[0] == w[1]) {
        return Err(HeatError::Domain("template slots must be distinct".into()));
    }
    let n = samples.len();
    if n < 2 * k {
        return Err(HeatError::InsufficientSamples {
            got: n,
            terms: k,
            needed: 2 * k,
        });
    }
    if let Some(bad) = samples
        .iter()
        .find(|s| !(s.t > 0.0) || !s.value.is_finite())
    {
        return Err(HeatError::Domain(format!("bad sample at t = {}", bad.t)));
    }
    let alpha_min = slots[0].exponent;
    let a0 = rational_to_f64(alpha_min);
    let mut a = DMatrix::<f64>::zeros(n, k);
    let mut b = DVector::<f64>::zeros(n);
    for (i, s) in samples.iter().enumerate() {
        let w = s.t.powf(-a0);
        for (j, slot) in slots.iter().enumerate() {
            a[(i, j)] = w * slot.eval(s.t);
        }
        b[i] = w * s.value;
    }
    let scales: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    if scales.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
        return Err(HeatError::IllConditioned(f64::INFINITY));
    }
    let mut an = a.clone();
    for (j, &c) in scales.iter().enumerate() {
        an.column_mut(j).scale_mut(1.0 / c);
    }
    let svd = an.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(HeatError::IllConditioned(condition));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| HeatError::Domain(format!("least-squares solve failed: {e}")))?;
    let resid = &an * &x - &b;
    let rss = resid.norm_squared();
    let residual_norm = (rss / n as f64).sqrt();
    let dof = (n - k).max(1) as f64;
    let sigma2 = rss / dof;
    let v_t = svd.v_t.as_ref().expect("requested");
    let terms = slots
        .iter()
        .enumerate()
        .map(|(j, &slot)| {
            // Var(x_j) = σ² Σ_l (V_jl / s_l)²
            let var: f64 = (0..k).map(|l| (v_t[(l, j)] / sv[l]).powi(2)).sum::<f64>() * sigma2;
            FitTerm {
                slot,
                coefficient: x[j] / scales[j],
                std_error: var.sqrt() / scales[j],
            }
        })
        .collect();
    Ok(ExpansionModel {
        terms,
        residual_norm,
        condition_estimate: condition,
        weight_exponent: alpha_min,
        data_scale: b.amax(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogDetection {
    pub detected: bool,
    /// Residual without logs divided by residual with logs.
    pub improvement: f64,
    pub without_logs: ExpansionModel,
    pub with_logs: ExpansionModel,
}

/// Fits `base` and `base` plus a `t^γ log t` term at every slot in `slots`;
/// a log is declared present when the residual drops by more than
/// [`LOG_IMPROVEMENT`] and the plain fit is not already at rounding level.
pub fn detect_logs(
    samples: &[TraceSample],
    base: &[Slot],
    slots: &[Rational],
) -> Result<LogDetection, HeatError> {
    let plain: Vec<Slot> = base.iter().filter(|s| s.log_power == 0).copied().collect();
    let mut augmented = plain.clone();
    for &g in slots {
        let slot = Slot::new(g, 1);
        if !augmented.contains(&slot) {
            augmented.push(slot);
        }
    }
    let without_logs = fit_expansion(samples, &plain)?;
    let with_logs = fit_expansion(samples, &augmented)?;
    let noise = 64.0 * f64::EPSILON * without_logs.data_scale.max(f64::MIN_POSITIVE);
    let improvement = if with_logs.residual_norm > 0.0 {
        without_logs.residual_norm / with_logs.residual_norm
    } else if without_logs.residual_norm > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let detected = without_logs.residual_norm > noise && improvement > LOG_IMPROVEMENT;
    Ok(LogDetection {
        detected,
        improvement,
        without_logs,
        with_logs,
    })
}

/// `∫₀^{t₀} t^{β−1} (log t)^p dt` for `β > 0`, by
/// `J_p = t₀^β (log t₀)^p / β − (p/β) J_{p−1}`. For `β < 0` the same
/// expression is the meromorphic continuation in `β`.
pub fn power_log_integral(beta: f64, p: u32, t0: f64) -> f64 {
    let lt = t0.ln();
    let tb = t0.powf(beta);
    let mut j = tb / beta;
    for q in 1..=p {
        j = tb * lt.powi(q as i32) / beta - (q as f64 / beta) * j;
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleStructure {
    pub residue_at_0: f64,
    pub double_pole_coeff: f64,
}

/// Poles of `η(D, s)` at `s = 0` produced by `c t^{−1/2} + d t^{−1/2} log t`
/// in `Tr D e^{−tD²}`. From `∫₀¹ t^{(s−1)/2}(…) dt = 2c/s − 4d/s²` and
/// `1/Γ((s+1)/2) = π^{−1/2}(1 − ψ(½)s/2 + O(s²))`:
/// residue `(2c + 2dψ(½))/√π`, double-pole coefficient `−4d/√π`.
pub fn pole_structure(model: &ExpansionModel) -> PoleStructure {
    let half = Ratio::new(-1, 2);
    let c = model.coefficient(half, 0).unwrap_or(0.0);
    let d = model.coefficient(half, 1).unwrap_or(0.0);
    let psi_half = -0.577_215_664_901_532_9 - 2.0 * std::f64::consts::LN_2;
    let sqrt_pi = PI.sqrt();
    PoleStructure {
        residue_at_0: (2.0 * c + 2.0 * d * psi_half) / sqrt_pi,
        double_pole_coeff: -4.0 * d / sqrt_pi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinOptions {
    pub points_per_decade: usize,
    /// Width in decades of the small-time fit window above `t_min`.
    pub fit_decades: f64,
    pub quad: QuadOptions,
}

impl Default for MellinOptions {
    fn default() -> Self {
        Self {
            points_per_decade: 40,
            fit_decades: 1.0,
            quad: QuadOptions {
                abs_tol: 1e-10,
                rel_tol: 1e-10,
                max_intervals: 4000,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinCheck {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    /// Quadrature, fit and truncation contributions to the error of `lhs`.
    pub lhs_error: f64,
    pub rhs_error: f64,
}

/// Compares `∫₀^∞ (K(t) + h/2) t^{s−1} dt` with `−Γ(s+½)/(2s√π) · η(D, 2s)`.
///
/// The integral is split at `t = 1`; on `(0, 1]` the substitution `u = √t`
/// is used. Below the smallest time the cutoff supports, `K + h/2` is
/// replaced by a fit in powers `t^{k/2}` and integrated in closed form.
pub fn mellin_check(
    spec: &Spectrum,
    s: f64,
    opts: MellinOptions,
) -> Result<MellinCheck, HeatError> {
    if !(s > 0.0) {
        return Err(HeatError::Domain(format!("s must be positive, got {s}")));
    }
    let eta = eta_function(spec, 2.0 * s).map_err(Box::new)?;
    let pref = -gamma(s + 0.5).value / (2.0 * s * PI.sqrt());
    let rhs = pref * eta.value;
    let rhs_error = pref.abs() * eta.abs_error_bound;

    if spec.is_symmetric() {
        return Ok(MellinCheck {
            s,
            lhs: 0.0,
            rhs,
            difference: rhs.abs(),
            lhs_error: 0.0,
            rhs_error,
        });
    }

    let g = |t: f64| k_shifted(spec, t).0;
    let t_c = min_time(spec);
    let mut lhs_error = 0.0;
    let mut small = 0.0;
    if t_c > 0.0 {
        if t_c >= 1.0 {
            return Err(HeatError::Domain(format!(
                "cutoff {} too small for the Mellin check",
                spec.cutoff
            )));
        }
        let grid = log_grid(
            t_c,
            t_c * 10f64.powf(opts.fit_decades),
            opts.points_per_decade,
        );
        let samples: Vec<TraceSample> = grid
            .par_iter()
            .map(|&t| {
                let (value, bound) = k_shifted(spec, t);
                TraceSample {
                    t,
                    value,
                    truncation_bound: bound,
                }
            })
            .collect();
        let template = power_template(&[
            Ratio::from_integer(0),
            Ratio::new(1, 2),
            Ratio::from_integer(1),
            Ratio::new(3, 2),
        ]);
        let model = fit_expansion(&samples, &template)?;
        for term in &model.terms {
            let beta = rational_to_f64(term.slot.exponent) + s;
            let j = power_log_integral(beta, term.slot.log_power, t_c);
            small += term.coefficient * j;
            lhs_error += (term.std_error * j).abs();
        }
        lhs_error += model.residual_norm * t_c.powf(s) / s;
        lhs_error += samples
            .iter()
            .map(|x| x.truncation_bound)
            .fold(0.0, f64::max)
            * t_c.powf(s)
            / s;
    }
    let u_lo = t_c.sqrt();
    let mid = integrate(
        |u: f64| {
            if u == 0.0 && s < 0.5 {
                return 0.0;
            }
            g(u * u) * u.powf(2.0 * s - 1.0) * 2.0
        },
        u_lo,
        1.0,
        opts.quad,
    )?;
    let far = integrate_to_infinity(|t: f64| g(t) * t.powf(s - 1.0), 1.0, opts.quad)?;
    let tail_at_c = if t_c > 0.0 {
        0.5 * spec
            .effective_tail()
            .map_or(0.0, |tl| tl.heat_bound(spec.cutoff, t_c))
    } else {
        0.0
    };
    lhs_error += mid.error + far.error + tail_at_c * (1.0 / s + 1.0);
    let lhs = small + mid.value + far.value;
    Ok(MellinCheck {
        s,
        lhs,
        rhs,
        difference: (lhs - rhs).abs(),
        lhs_error,
        rhs_error,
    })
}

/// Prints a slot as `t^γ` or `t^γ log^p t`.
pub fn slot_label(slot: &Slot) -> String {
    match slot.log_power {
        0 => format!("t^{}", fmt_rational(&slot.exponent)),
        1 => format!("t^{} log t", fmt_rational(&slot.exponent)),
        p => format!("t^{} log^{p} t", fmt_rational(&slot.exponent)),
    }
}
