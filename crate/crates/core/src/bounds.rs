//! Evaluation of the total-variation bounds obtained from the
//! reflection-subordinate coupling.
//!
//! The central quantity is `I(t) = ∫_0^∞ r^{-1/2} e^{-c t f(r)} dr`. Since
//! `2P(T^B > s) ≤ |x−y|/√(πs)` and `E[S_t^{-1/2}] = π^{-1/2} I(t)`, the
//! coupling inequality gives `‖P_t(x,·) − P_t(y,·)‖ ≤ |x−y| I(t) / π`. The
//! constant `1/(√2 π)` is also available for comparison with the form
//! sometimes quoted; it is not a valid bound (it falls below the exact
//! Gaussian total variation for the pure-drift subordinator).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bernstein::{BernsteinSpec, DoublingReport, SlopeAtZero};
use crate::error::{LabError, Result};
use crate::quad::{integrate_to_infinity, QuadOptions, TailOptions};
use crate::special::gamma;

/// Which prefactor multiplies `|x−y| I(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorMode {
    /// `1/π`.
    #[default]
    Corrected,
    /// `1/(√2 π)`.
    AsPrinted,
}

impl PrefactorMode {
    pub fn value(self) -> f64 {
        match self {
            PrefactorMode::Corrected => 1.0 / PI,
            PrefactorMode::AsPrinted => 1.0 / (2f64.sqrt() * PI),
        }
    }
}

/// Rate constant inside the exponent of `I(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CMode {
    /// `c = 1`, for subordinate Brownian motion.
    #[default]
    UnitRate,
    /// `c = c_constant(d)`, for Lévy processes dominating a subordinate one.
    GeneralLevy,
}

#[derive(Debug, Clone)]
pub struct BoundRequest {
    pub spec: BernsteinSpec,
    pub t: f64,
    pub distance: f64,
    pub dimension: usize,
    pub prefactor_mode: PrefactorMode,
    pub c_mode: CMode,
}

impl BoundRequest {
    pub fn new(spec: BernsteinSpec, t: f64, distance: f64) -> Self {
        BoundRequest {
            spec,
            t,
            distance,
            dimension: 1,
            prefactor_mode: PrefactorMode::Corrected,
            c_mode: CMode::UnitRate,
        }
    }

    pub fn dimension(mut self, d: usize) -> Self {
        self.dimension = d;
        self
    }

    pub fn mode(mut self, mode: PrefactorMode) -> Self {
        self.prefactor_mode = mode;
        self
    }

    pub fn c_mode(mut self, c_mode: CMode) -> Self {
        self.c_mode = c_mode;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(LabError::Argument(format!("t must be positive, got {}", self.t)));
        }
        if !(self.distance >= 0.0 && self.distance.is_finite()) {
            return Err(LabError::Argument(format!("distance must be nonnegative, got {}", self.distance)));
        }
        if self.dimension == 0 {
            return Err(LabError::Argument("dimension must be at least 1".into()));
        }
        Ok(())
    }

    fn rate(&self) -> f64 {
        match self.c_mode {
            CMode::UnitRate => 1.0,
            CMode::GeneralLevy => c_constant(self.dimension),
        }
    }
}

/// `I(t)` with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundIntegral {
    pub value: f64,
    /// Quadrature error estimate plus the tail majorant beyond `upper`.
    pub abs_error: f64,
    /// Upper end of the integration range in `r`.
    pub upper: f64,
    /// The growth proxy `c t f(r) > log(r)/2` failed at a probe point.
    pub divergence_warning: bool,
}

/// Probe points of the growth proxy.
pub const GROWTH_PROBES: [f64; 2] = [1e6, 1e12];

/// `c t f(r) / log r` at the probe points. The integral converges when
/// this ratio stays above 1/2 for large `r`, and diverges when it stays
/// below.
pub fn growth_ratios(spec: &BernsteinSpec, t: f64, c_rate: f64) -> [f64; 2] {
    GROWTH_PROBES.map(|r| c_rate * t * spec.eval_unchecked(r) / r.ln())
}

/// `∫_0^∞ r^{-1/2} e^{-c t f(r)} dr`.
pub fn bound_integral(spec: &BernsteinSpec, t: f64, c_rate: f64) -> Result<f64> {
    Ok(bound_integral_report(spec, t, c_rate)?.value)
}

/// [`bound_integral`] with error estimate and divergence diagnostics.
///
/// After `r = u²` the integrand `2 e^{-c t f(u²)}` is bounded; it is
/// integrated by adaptive Gauss–Kronrod panels of doubling width, starting
/// at the natural scale `u = f^{-1}(1/(ct))^{1/2}`, until panels stop
/// contributing relative to the accumulated value.
pub fn bound_integral_report(spec: &BernsteinSpec, t: f64, c_rate: f64) -> Result<BoundIntegral> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(LabError::Argument(format!("t must be positive, got {t}")));
    }
    if !(c_rate > 0.0 && c_rate.is_finite()) {
        return Err(LabError::Argument(format!("rate constant must be positive, got {c_rate}")));
    }
    let k = c_rate * t;
    let divergence_warning = growth_ratios(spec, t, c_rate).iter().any(|&g| !(g > 0.5));
    let scale = spec.inverse(1.0 / k).map(f64::sqrt).unwrap_or(1.0);
    let first_width = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let integrand = |u: f64| 2.0 * (-k * spec.eval_unchecked(u * u)).exp();
    let opts = TailOptions {
        first_width,
        rel_increment: 1e-10,
        // tiny natural scales (f nearly flat at 0) need many doublings; stop
        // well before u² overflows
        max_doublings: ((1e150 / first_width).log2() as usize).clamp(60, 600),
        panel: QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_subdivisions: 4000 },
    };
    let q = integrate_to_infinity(integrand, 0.0, opts).map_err(|e| match e {
        LabError::Divergence(m) => LabError::Divergence(format!(
            "∫ r^(-1/2) exp(-{k} f(r)) dr does not converge for {}: {m}",
            spec.label()
        )),
        other => other,
    })?;
    // Tail majorant beyond U from the log-growth envelope
    // k f(u²) ≥ g log(u²) (taken from the last panel end): ∫_U^∞ 2 u^{-2g}.
    let u_end = q.upper;
    let g = k * spec.eval_unchecked(u_end * u_end) / (u_end * u_end).ln();
    let tail = if g > 0.5 && u_end > 1.0 { 2.0 * u_end.powf(1.0 - 2.0 * g) / (2.0 * g - 1.0) } else { 0.0 };
    Ok(BoundIntegral { value: q.value, abs_error: q.abs_error + tail, upper: u_end * u_end, divergence_warning })
}

/// `min(2, prefactor · |x−y| · I(t))`.
pub fn tv_bound_subordinate(req: &BoundRequest) -> Result<f64> {
    req.validate()?;
    if req.distance == 0.0 {
        return Ok(0.0);
    }
    let i = bound_integral(&req.spec, req.t, req.rate())?;
    Ok((req.prefactor_mode.value() * req.distance * i).min(2.0))
}

/// The three terms of the general-Lévy bound and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralBound {
    /// `prefactor · |x−y| · ∫ r^{-1/2} e^{-c t f(r)} dr` with `c = c(d)`.
    pub integral_term: f64,
    /// `C (1 + |x−y|) / √t`.
    pub envelope_term: f64,
    pub value: f64,
}

/// `min(integral term, C(1+|x−y|)/√t, 2)` with `c = c_constant(d)` in the
/// exponent. `c_env` is the (unspecified) envelope constant `C`.
pub fn tv_bound_general(req: &BoundRequest, c_env: f64) -> Result<GeneralBound> {
    req.validate()?;
    let integral_term = if req.distance == 0.0 {
        0.0
    } else {
        req.prefactor_mode.value() * req.distance * bound_integral(&req.spec, req.t, c_constant(req.dimension))?
    };
    let envelope_term = c_env * (1.0 + req.distance) / req.t.sqrt();
    Ok(GeneralBound { integral_term, envelope_term, value: integral_term.min(envelope_term).min(2.0) })
}

/// `c(d) = π^{d/2} cos 1 / (2d Γ(d/2 + 1))`.
pub fn c_constant(d: usize) -> f64 {
    let d = d as f64;
    PI.powf(d / 2.0) * 1f64.cos() / (2.0 * d * gamma(d / 2.0 + 1.0))
}

/// Hypothesis checks attached to the `f^{-1}` envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateHypotheses {
    /// `f(r)/log r` at `r = 1e6, 1e12`.
    pub log_growth: [f64; 2],
    pub log_growth_ok: bool,
    /// `f(r)|log r|` at `r = 1e-6, 1e-12`.
    pub small_scale: [f64; 2],
    pub small_scale_ok: bool,
    pub doubling: DoublingReport,
    pub doubling_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticRate {
    /// `|x−y| √(f^{-1}(1/t))`, the envelope with constant 1.
    pub envelope: f64,
    pub hypotheses: RateHypotheses,
}

/// `|x−y| √(f^{-1}(1/t))` together with the hypothesis report.
pub fn asymptotic_rate(spec: &BernsteinSpec, t: f64, distance: f64) -> Result<AsymptoticRate> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(LabError::Argument(format!("t must be positive, got {t}")));
    }
    let envelope = distance * spec.inverse(1.0 / t)?.sqrt();
    Ok(AsymptoticRate { envelope, hypotheses: rate_hypotheses(spec)? })
}

pub fn rate_hypotheses(spec: &BernsteinSpec) -> Result<RateHypotheses> {
    let log_growth = GROWTH_PROBES.map(|r| spec.eval_unchecked(r) / r.ln());
    // both probes positive and not collapsing between them
    let log_growth_ok = log_growth[0] > 0.0 && log_growth[1] > 0.0 && log_growth[1] >= 0.5 * log_growth[0];
    let small_scale = [1e-6, 1e-12].map(|r: f64| spec.eval_unchecked(r) * r.ln().abs());
    // bounded: does not grow by more than the ratio of |log r| between probes
    let small_scale_ok = small_scale.iter().all(|v| v.is_finite()) && small_scale[1] <= 2.0 * small_scale[0].max(1e-300);
    let doubling = spec.doubling_diagnostic(&crate::bernstein::default_doubling_grid())?;
    let doubling_ok = doubling.limsup_estimate.is_finite() && doubling.sufficient_c.is_some();
    Ok(RateHypotheses { log_growth, log_growth_ok, small_scale, small_scale_ok, doubling, doubling_ok })
}

/// Product-coupling bound:
/// `2 ∧ Σ_i [ prefactor |x_i−y_i| ∫ r^{-1/2} e^{-c(d) t f_i(r)} dr ∧ C(1+|x_i−y_i|)/√t ]`.
pub fn bound_product(
    specs: &[BernsteinSpec],
    t: f64,
    distances: &[f64],
    d: usize,
    c_env: f64,
    mode: PrefactorMode,
) -> Result<f64> {
    if specs.len() != distances.len() {
        return Err(LabError::Argument(format!("{} specs for {} distances", specs.len(), distances.len())));
    }
    if !(t > 0.0) {
        return Err(LabError::Argument(format!("t must be positive, got {t}")));
    }
    let c = c_constant(d);
    let mut sum = 0.0;
    for (spec, &h) in specs.iter().zip(distances) {
        let h = h.abs();
        if h == 0.0 {
            continue;
        }
        let first = mode.value() * h * bound_integral(spec, t, c)?;
        sum += first.min(c_env * (1.0 + h) / t.sqrt());
    }
    Ok(sum.min(2.0))
}

/// Lower bound `√(π / (t f'(0+)))` for `I(t)` when `f'(0+)` is finite
/// (Jensen: `E S_t^{-1/2} ≥ (E S_t)^{-1/2}`); `None` when `f'(0+) = ∞`.
pub fn lower_bound_integral(spec: &BernsteinSpec, t: f64) -> Option<f64> {
    lower_bound_integral_mode(spec, t, PrefactorMode::Corrected)
}

/// As [`lower_bound_integral`]; `AsPrinted` uses the constant `√(2π)`.
pub fn lower_bound_integral_mode(spec: &BernsteinSpec, t: f64, mode: PrefactorMode) -> Option<f64> {
    match spec.fprime_at_zero() {
        SlopeAtZero::Infinite => None,
        SlopeAtZero::Finite(m) => {
            let k = match mode {
                PrefactorMode::Corrected => PI,
                PrefactorMode::AsPrinted => 2.0 * PI,
            };
            Some((k / (t * m)).sqrt())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyBoundCheck {
    pub min_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub pass: bool,
}

/// Checks `ν(z) ≥ |z|^{-d} f(|z|^{-2})` at the sample points.
pub fn check_levy_lower_bound<F: Fn(&[f64]) -> f64>(
    levy_density: F,
    spec: &BernsteinSpec,
    points: &[Vec<f64>],
) -> Result<LevyBoundCheck> {
    let mut min_residual = f64::INFINITY;
    let mut worst_point = None;
    for z in points {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(LabError::Argument("sample points must exclude the origin".into()));
        }
        let d = z.len() as i32;
        let residual = levy_density(z) - r.powi(-d) * spec.eval(r.powi(-2))?;
        if residual < min_residual {
            min_residual = residual;
            worst_point = Some(z.clone());
        }
    }
    Ok(LevyBoundCheck { min_residual, worst_point, pass: min_residual >= -1e-12 })
}
