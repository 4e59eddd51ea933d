//! Bernstein functions: the catalog families, user-supplied functions, and
//! their calculus (evaluation, derivatives, inverse, behaviour at zero).
//!
//! Every catalog family has `f(0+) = 0` and is strictly increasing and onto
//! `(0, ∞)`. Parameter ranges are checked once at construction, after which
//! evaluation is total on positive arguments.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::jet::Jet;
use crate::special::gamma;

/// A real function of one positive variable, shared between threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Catalog families, in the serialized form used by configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `λ^{α/2}`, α ∈ (0, 2).
    StablePow { alpha: f64 },
    /// `λ^{α/2} + λ^{β/2}`, 0 < α < β < 2.
    MixedStable { alpha: f64, beta: f64 },
    /// `λ^{α/2} (log(1+λ))^{β/2}`, α ∈ (0, 2), β ∈ (0, 2 − α).
    LogUp { alpha: f64, beta: f64 },
    /// `λ^{α/2} (log(1+λ))^{−β/2}`, α ∈ (0, 2), β ∈ (0, α).
    LogDown { alpha: f64, beta: f64 },
    /// `(λ + m^{2/α})^{α/2} − m`, α ∈ (0, 2), m > 0.
    Relativistic { alpha: f64, m: f64 },
    /// `log^{1/α}(1 + λ^α)`, α ∈ (0, 1].
    LogStable { alpha: f64 },
    /// `log(1 + λ^α)`, α ∈ (0, 1].
    GeometricStable { alpha: f64 },
    /// `bλ`, pure drift. Diagnostic only.
    Linear { b: f64 },
}

/// A user-supplied Bernstein function.
#[derive(Clone)]
pub struct CustomBernstein {
    pub name: String,
    pub eval: RealFn,
    pub levy_density: Option<RealFn>,
    pub inverse: Option<RealFn>,
}

impl fmt::Debug for CustomBernstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBernstein")
            .field("name", &self.name)
            .field("levy_density", &self.levy_density.is_some())
            .field("inverse", &self.inverse.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Catalog(Family),
    Custom(CustomBernstein),
}

/// A validated Bernstein function.
#[derive(Debug, Clone)]
pub struct BernsteinSpec {
    repr: Repr,
}

/// Limit of `f'(λ)` as `λ ↓ 0`, which equals `E[S_1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeAtZero {
    Finite(f64),
    Infinite,
}

impl SlopeAtZero {
    pub fn is_infinite(&self) -> bool {
        matches!(self, SlopeAtZero::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            SlopeAtZero::Finite(v) => Some(v),
            SlopeAtZero::Infinite => None,
        }
    }
}

/// Result of [`BernsteinSpec::check_complete_monotone`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub pass: bool,
    /// Largest scaled sign violation found (0 when every sign is right).
    pub worst_violation: f64,
    /// Where the worst violation occurred: `(λ, derivative order)`.
    pub worst_at: Option<(f64, usize)>,
}

/// Result of [`BernsteinSpec::doubling_diagnostic`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    /// `(s, f^{-1}(2s) / f^{-1}(s))` along the grid.
    pub ratios: Vec<(f64, f64)>,
    /// Maximum ratio over the tail half of the grid (the limsup estimate).
    pub limsup_estimate: f64,
    /// Smallest tested `c` with `2 f(s) ≤ f(c s)` on the tail half, if any.
    pub sufficient_c: Option<f64>,
}

/// Violations of the derivative sign pattern below this (scaled) size are ignored.
pub const SIGN_TOLERANCE: f64 = 1e-9;

fn check_range(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(LabError::Parameter(what.to_string()))
    }
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        let open02 = |a: f64| 0.0 < a && a < 2.0;
        match *self {
            Family::StablePow { alpha } => check_range(open02(alpha), "stable_pow requires alpha in (0,2)"),
            Family::MixedStable { alpha, beta } => check_range(
                0.0 < alpha && alpha < beta && beta < 2.0,
                "mixed_stable requires 0 < alpha < beta < 2",
            ),
            Family::LogUp { alpha, beta } => check_range(
                open02(alpha) && 0.0 < beta && beta < 2.0 - alpha,
                "log_up requires alpha in (0,2) and beta in (0, 2-alpha)",
            ),
            Family::LogDown { alpha, beta } => check_range(
                open02(alpha) && 0.0 < beta && beta < alpha,
                "log_down requires alpha in (0,2) and beta in (0, alpha)",
            ),
            Family::Relativistic { alpha, m } => check_range(
                open02(alpha) && m > 0.0 && m.is_finite(),
                "relativistic requires alpha in (0,2) and m > 0",
            ),
            Family::LogStable { alpha } => {
                check_range(0.0 < alpha && alpha <= 1.0, "log_stable requires alpha in (0,1]")
            }
            Family::GeometricStable { alpha } => check_range(
                0.0 < alpha && alpha <= 1.0,
                "geometric_stable requires alpha in (0,1] (log(1+λ^α) is Bernstein only for α ≤ 1)",
            ),
            Family::Linear { b } => check_range(b > 0.0 && b.is_finite(), "linear requires b > 0"),
        }
    }
}

impl BernsteinSpec {
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        Ok(BernsteinSpec { repr: Repr::Catalog(family) })
    }

    pub fn stable_pow(alpha: f64) -> Result<Self> {
        Self::new(Family::StablePow { alpha })
    }

    pub fn mixed_stable(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::MixedStable { alpha, beta })
    }

    pub fn log_up(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::LogUp { alpha, beta })
    }

    pub fn log_down(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::LogDown { alpha, beta })
    }

    pub fn relativistic(alpha: f64, m: f64) -> Result<Self> {
        Self::new(Family::Relativistic { alpha, m })
    }

    pub fn log_stable(alpha: f64) -> Result<Self> {
        Self::new(Family::LogStable { alpha })
    }

    pub fn geometric_stable(alpha: f64) -> Result<Self> {
        Self::new(Family::GeometricStable { alpha })
    }

    pub fn linear(b: f64) -> Result<Self> {
        Self::new(Family::Linear { b })
    }

    /// A user-supplied function. Its Bernstein property is not verified here;
    /// run [`check_complete_monotone`](Self::check_complete_monotone).
    pub fn custom(custom: CustomBernstein) -> Self {
        BernsteinSpec { repr: Repr::Custom(custom) }
    }

    /// Shorthand for a custom function with no extra structure.
    pub fn custom_fn<F>(name: &str, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::custom(CustomBernstein { name: name.into(), eval: Arc::new(f), levy_density: None, inverse: None })
    }

    pub fn family(&self) -> Option<&Family> {
        match &self.repr {
            Repr::Catalog(f) => Some(f),
            Repr::Custom(_) => None,
        }
    }

    pub fn custom_parts(&self) -> Option<&CustomBernstein> {
        match &self.repr {
            Repr::Custom(c) => Some(c),
            Repr::Catalog(_) => None,
        }
    }

    /// True for `Linear`: a pure-drift function, outside the drift-free
    /// setting assumed by the Lévy-measure bounds.
    pub fn has_drift(&self) -> bool {
        matches!(self.repr, Repr::Catalog(Family::Linear { .. }))
    }

    pub fn label(&self) -> String {
        match &self.repr {
            Repr::Catalog(f) => match *f {
                Family::StablePow { alpha } => format!("stable_pow(alpha={alpha})"),
                Family::MixedStable { alpha, beta } => format!("mixed_stable(alpha={alpha},beta={beta})"),
                Family::LogUp { alpha, beta } => format!("log_up(alpha={alpha},beta={beta})"),
                Family::LogDown { alpha, beta } => format!("log_down(alpha={alpha},beta={beta})"),
                Family::Relativistic { alpha, m } => format!("relativistic(alpha={alpha},m={m})"),
                Family::LogStable { alpha } => format!("log_stable(alpha={alpha})"),
                Family::GeometricStable { alpha } => format!("geometric_stable(alpha={alpha})"),
                Family::Linear { b } => format!("linear(b={b})"),
            },
            Repr::Custom(c) => format!("custom({})", c.name),
        }
    }

    fn check_arg(lambda: f64) -> Result<()> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(())
        } else {
            Err(LabError::Domain(format!("argument must be positive and finite, got {lambda}")))
        }
    }

    /// `f(λ)` for `λ > 0`.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        Self::check_arg(lambda)?;
        Ok(self.eval_unchecked(lambda))
    }

    /// `f(λ)` without argument validation; `λ` must be positive.
    pub fn eval_unchecked(&self, l: f64) -> f64 {
        match &self.repr {
            Repr::Catalog(f) => match *f {
                Family::StablePow { alpha } => l.powf(alpha / 2.0),
                Family::MixedStable { alpha, beta } => l.powf(alpha / 2.0) + l.powf(beta / 2.0),
                Family::LogUp { alpha, beta } => l.powf(alpha / 2.0) * l.ln_1p().powf(beta / 2.0),
                Family::LogDown { alpha, beta } => l.powf(alpha / 2.0) * l.ln_1p().powf(-beta / 2.0),
                Family::Relativistic { alpha, m } => {
                    let mass = m.powf(2.0 / alpha);
                    m * ((alpha / 2.0) * (l / mass).ln_1p()).exp_m1()
                }
                Family::LogStable { alpha } => l.powf(alpha).ln_1p().powf(1.0 / alpha),
                Family::GeometricStable { alpha } => l.powf(alpha).ln_1p(),
                Family::Linear { b } => b * l,
            },
            Repr::Custom(c) => (c.eval)(l),
        }
    }

    /// Taylor jet of a catalog function at `λ` (None for custom functions).
    fn jet(&self, l: f64) -> Option<Jet> {
        let x = Jet::variable(l);
        let f = match &self.repr {
            Repr::Custom(_) => return None,
            Repr::Catalog(f) => *f,
        };
        Some(match f {
            Family::StablePow { alpha } => x.powf(alpha / 2.0),
            Family::MixedStable { alpha, beta } => x.powf(alpha / 2.0) + x.powf(beta / 2.0),
            Family::LogUp { alpha, beta } => x.powf(alpha / 2.0) * x.ln_1p().powf(beta / 2.0),
            Family::LogDown { alpha, beta } => x.powf(alpha / 2.0) * x.ln_1p().powf(-beta / 2.0),
            Family::Relativistic { alpha, m } => {
                let mass = m.powf(2.0 / alpha);
                x.scale(1.0 / mass).ln_1p().scale(alpha / 2.0).exp_m1().scale(m)
            }
            Family::LogStable { alpha } => x.powf(alpha).ln_1p().powf(1.0 / alpha),
            Family::GeometricStable { alpha } => x.powf(alpha).ln_1p(),
            Family::Linear { b } => x.scale(b),
        })
    }

    /// `f^{(k)}(λ)` for `k ∈ 1..=4`.
    ///
    /// Catalog families are differentiated exactly by Taylor-jet propagation.
    /// Custom functions use central differences with one Richardson step;
    /// the base step grows with the order (`λ·1e-5` for the first
    /// derivative) to keep rounding noise below the truncation error.
    pub fn deriv(&self, lambda: f64, k: usize) -> Result<f64> {
        if !(1..=4).contains(&k) {
            return Err(LabError::Argument(format!("derivative order must be in 1..=4, got {k}")));
        }
        Self::check_arg(lambda)?;
        if let Some(j) = self.jet(lambda) {
            return Ok(j.derivative(k));
        }
        let f = |x: f64| self.eval_unchecked(x);
        Ok(richardson_derivative(&f, lambda, k))
    }

    /// `f^{-1}(s)` for `s > 0`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(LabError::Domain(format!("inverse needs a positive finite level, got {s}")));
        }
        let v = match self.analytic_inverse(s) {
            Some(v) => v,
            None => self.numeric_inverse(s)?,
        };
        if !v.is_finite() {
            return Err(LabError::Domain(format!("f^{{-1}}({s}) of {} overflows", self.label())));
        }
        Ok(v)
    }

    fn analytic_inverse(&self, s: f64) -> Option<f64> {
        match &self.repr {
            Repr::Catalog(f) => match *f {
                Family::StablePow { alpha } => Some(s.powf(2.0 / alpha)),
                Family::Relativistic { alpha, m } => {
                    let mass = m.powf(2.0 / alpha);
                    Some(mass * ((2.0 / alpha) * (s / m).ln_1p()).exp_m1())
                }
                Family::LogStable { alpha } => Some(s.powf(alpha).exp_m1().powf(1.0 / alpha)),
                Family::GeometricStable { alpha } => Some(s.exp_m1().powf(1.0 / alpha)),
                Family::Linear { b } => Some(s / b),
                _ => None,
            },
            Repr::Custom(c) => c.inverse.as_ref().map(|g| g(s)),
        }
    }

    // Bracket by geometric expansion from λ = 1, then safeguarded Newton in
    // log λ with bisection fallback.
    fn numeric_inverse(&self, s: f64) -> Result<f64> {
        let f = |l: f64| self.eval_unchecked(l);
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        let mut doublings = 0;
        if f(1.0) < s {
            while f(hi) < s {
                lo = hi;
                hi *= 2.0;
                doublings += 1;
                if doublings > 200 || !hi.is_finite() {
                    return Err(LabError::NonConvergence(format!(
                        "could not bracket f^-1({s}) within 200 doublings; f may not be onto"
                    )));
                }
            }
        } else {
            while f(lo) > s {
                hi = lo;
                lo *= 0.5;
                doublings += 1;
                if doublings > 200 || lo == 0.0 {
                    return Err(LabError::NonConvergence(format!(
                        "could not bracket f^-1({s}) within 200 halvings"
                    )));
                }
            }
        }
        if f(lo) == s {
            return Ok(lo);
        }
        if f(hi) == s {
            return Ok(hi);
        }
        let target = s.ln();
        let (mut ulo, mut uhi) = (lo.ln(), hi.ln());
        let mut u = 0.5 * (ulo + uhi);
        for _ in 0..400 {
            let l = u.exp();
            let fl = f(l);
            let g = fl.ln() - target;
            if g == 0.0 {
                return Ok(l);
            }
            if g < 0.0 {
                ulo = u;
            } else {
                uhi = u;
            }
            // d/du ln f(e^u) = λ f'(λ) / f(λ)
            let slope = match self.jet(l) {
                Some(j) => l * j.derivative(1) / fl,
                None => l * richardson_derivative(&f, l, 1) / fl,
            };
            let newton = u - g / slope;
            let next = if slope.is_finite() && slope > 0.0 && newton > ulo && newton < uhi {
                newton
            } else {
                0.5 * (ulo + uhi)
            };
            if (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(1.0) || uhi - ulo <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
                let l = next.exp();
                let resid = (f(l) - s).abs();
                if resid <= 1e-12 * s.max(1.0) {
                    return Ok(l);
                }
                return Err(LabError::NonConvergence(format!("inverse stalled at residual {resid:e}")));
            }
            u = next;
        }
        Err(LabError::NonConvergence(format!("inverse of {s} did not converge")))
    }

    /// `f'(0+)`, i.e. `E[S_1]`: classified in closed form for catalog
    /// families. Custom functions are probed at λ = 1e-2, 1e-4, 1e-6 and
    /// declared infinite when the derivative grows by a factor above 5 at both
    /// steps; otherwise the last two probes are linearly extrapolated to 0.
    pub fn fprime_at_zero(&self) -> SlopeAtZero {
        match &self.repr {
            Repr::Catalog(f) => match *f {
                Family::StablePow { .. } | Family::MixedStable { .. } | Family::LogUp { .. } | Family::LogDown { .. } => {
                    SlopeAtZero::Infinite
                }
                Family::Relativistic { alpha, m } => SlopeAtZero::Finite(0.5 * alpha * m.powf(1.0 - 2.0 / alpha)),
                Family::LogStable { .. } => SlopeAtZero::Finite(1.0),
                Family::GeometricStable { alpha } => {
                    if alpha < 1.0 {
                        SlopeAtZero::Infinite
                    } else {
                        SlopeAtZero::Finite(1.0)
                    }
                }
                Family::Linear { b } => SlopeAtZero::Finite(b),
            },
            Repr::Custom(_) => {
                let f = |x: f64| self.eval_unchecked(x);
                let d2 = richardson_derivative(&f, 1e-2, 1);
                let d4 = richardson_derivative(&f, 1e-4, 1);
                let d6 = richardson_derivative(&f, 1e-6, 1);
                if d4 > 5.0 * d2 && d6 > 5.0 * d4 {
                    SlopeAtZero::Infinite
                } else {
                    SlopeAtZero::Finite(d6 + (d6 - d4) * 1e-6 / (1e-4 - 1e-6))
                }
            }
        }
    }

    /// Checks `f ≥ 0`, `f' ≥ 0` and alternation of signs of higher
    /// derivatives up to `order` at each grid point.
    ///
    /// A sign violation of the k-th derivative is measured relative to the
    /// natural scale `max(1, f(λ)/λ^k)` and reported when above
    /// [`SIGN_TOLERANCE`].
    pub fn check_complete_monotone(&self, grid: &[f64], order: usize) -> Result<MonotoneReport> {
        if grid.is_empty() {
            return Err(LabError::Argument("grid must be nonempty".into()));
        }
        let order = order.min(4);
        let mut worst = 0.0f64;
        let mut worst_at = None;
        for &l in grid {
            let fl = self.eval(l)?;
            let mut record = |v: f64, k: usize| {
                if v > worst {
                    worst = v;
                    worst_at = Some((l, k));
                }
            };
            record(-fl, 0);
            for k in 1..=order {
                let d = self.deriv(l, k)?;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                let scale = (fl / l.powi(k as i32)).abs().max(1.0);
                record(-sign * d / scale, k);
            }
        }
        Ok(MonotoneReport { pass: worst <= SIGN_TOLERANCE, worst_violation: worst, worst_at })
    }

    /// Estimates `limsup_{s→0} f^{-1}(2s)/f^{-1}(s)` along a decreasing grid,
    /// and searches for a constant `c` with `2f(s) ≤ f(cs)` for small `s`.
    pub fn doubling_diagnostic(&self, s_grid: &[f64]) -> Result<DoublingReport> {
        if s_grid.is_empty() {
            return Err(LabError::Argument("grid must be nonempty".into()));
        }
        if s_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(LabError::Argument("grid must be strictly decreasing".into()));
        }
        let mut ratios = Vec::with_capacity(s_grid.len());
        for &s in s_grid {
            ratios.push((s, self.inverse(2.0 * s)? / self.inverse(s)?));
        }
        let tail = &ratios[ratios.len() / 2..];
        let limsup_estimate = tail.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);

        let tail_s: Vec<f64> = s_grid[s_grid.len() / 2..].to_vec();
        let sufficient_c = (1..=160).map(|j| 2f64.powf(j as f64 / 8.0)).find(|&c| {
            tail_s
                .iter()
                .all(|&s| 2.0 * self.eval_unchecked(s) <= self.eval_unchecked(c * s) * (1.0 + 1e-12))
        });
        Ok(DoublingReport { ratios, limsup_estimate, sufficient_c })
    }

    /// Density of the Lévy measure `μ(ds)` of the associated subordinator,
    /// when known in closed form.
    pub fn levy_density(&self) -> Option<RealFn> {
        let stable = |a: f64| {
            let c = a / gamma(1.0 - a);
            move |s: f64| c * s.powf(-1.0 - a)
        };
        match &self.repr {
            Repr::Catalog(f) => match *f {
                Family::StablePow { alpha } => Some(Arc::new(stable(alpha / 2.0))),
                Family::MixedStable { alpha, beta } => {
                    let (p, q) = (stable(alpha / 2.0), stable(beta / 2.0));
                    Some(Arc::new(move |s| p(s) + q(s)))
                }
                Family::Relativistic { alpha, m } => {
                    let mass = m.powf(2.0 / alpha);
                    let p = stable(alpha / 2.0);
                    Some(Arc::new(move |s| p(s) * (-mass * s).exp()))
                }
                Family::GeometricStable { alpha } | Family::LogStable { alpha } if alpha == 1.0 => {
                    Some(Arc::new(|s: f64| (-s).exp() / s))
                }
                _ => None,
            },
            Repr::Custom(c) => c.levy_density.clone(),
        }
    }
}

/// Default grid `s = 2^{-k}`, `k = 1..=40`, for the doubling diagnostic.
pub fn default_doubling_grid() -> Vec<f64> {
    (1..=40).map(|k| 2f64.powi(-k)).collect()
}

/// Log-spaced grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn central_difference<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64, k: usize) -> f64 {
    match k {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        4 => (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (h * h * h * h),
        _ => unreachable!("order checked by caller"),
    }
}

/// Central difference of order `k` with one Richardson extrapolation step.
pub(crate) fn richardson_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, k: usize) -> f64 {
    let rel = match k {
        1 => 1e-5,
        2 => 1e-3,
        3 => 5e-3,
        _ => 1e-2,
    };
    let h = x * rel;
    let coarse = central_difference(f, x, h, k);
    let fine = central_difference(f, x, 0.5 * h, k);
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn catalog() -> Vec<BernsteinSpec> {
        vec![
            BernsteinSpec::stable_pow(0.5).unwrap(),
            BernsteinSpec::stable_pow(1.0).unwrap(),
            BernsteinSpec::stable_pow(1.5).unwrap(),
            BernsteinSpec::mixed_stable(0.5, 1.0).unwrap(),
            BernsteinSpec::log_up(1.0, 0.5).unwrap(),
            BernsteinSpec::log_down(1.0, 0.5).unwrap(),
            BernsteinSpec::relativistic(1.0, 1.0).unwrap(),
            BernsteinSpec::relativistic(1.5, 2.0).unwrap(),
            BernsteinSpec::log_stable(0.5).unwrap(),
            BernsteinSpec::log_stable(1.0).unwrap(),
            BernsteinSpec::geometric_stable(0.5).unwrap(),
            BernsteinSpec::geometric_stable(1.0).unwrap(),
            BernsteinSpec::linear(1.0).unwrap(),
        ]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(BernsteinSpec::stable_pow(1.0).unwrap().eval(4.0).unwrap(), 2.0);
        let r = BernsteinSpec::relativistic(1.0, 1.0).unwrap().eval(3.0).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        let g = BernsteinSpec::geometric_stable(1.0).unwrap().eval(E - 1.0).unwrap();
        assert!((g - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_nonpositive_argument() {
        let f = BernsteinSpec::stable_pow(1.0).unwrap();
        assert!(matches!(f.eval(0.0), Err(LabError::Domain(_))));
        assert!(matches!(f.eval(-1.0), Err(LabError::Domain(_))));
        assert!(matches!(f.eval(f64::NAN), Err(LabError::Domain(_))));
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert!(BernsteinSpec::stable_pow(2.0).is_err());
        assert!(BernsteinSpec::stable_pow(f64::NAN).is_err());
        assert!(BernsteinSpec::mixed_stable(1.0, 0.5).is_err());
        assert!(BernsteinSpec::log_up(1.5, 0.6).is_err());
        assert!(BernsteinSpec::log_down(0.5, 0.5).is_err());
        assert!(BernsteinSpec::relativistic(1.0, 0.0).is_err());
        assert!(BernsteinSpec::log_stable(1.2).is_err());
        assert!(BernsteinSpec::geometric_stable(1.5).is_err());
        assert!(BernsteinSpec::linear(-1.0).is_err());
    }

    #[test]
    fn relativistic_small_argument_has_no_cancellation() {
        // f(λ) ≈ f'(0) λ with f'(0) = 1/2 for α = m = 1
        let f = BernsteinSpec::relativistic(1.0, 1.0).unwrap();
        let v = f.eval(1e-12).unwrap();
        assert!((v / 1e-12 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn deriv_examples() {
        let f = BernsteinSpec::stable_pow(1.0).unwrap();
        assert!((f.deriv(1.0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((f.deriv(1.0, 2).unwrap() + 0.25).abs() < 1e-15);
        assert!(matches!(f.deriv(1.0, 0), Err(LabError::Argument(_))));
        assert!(matches!(f.deriv(1.0, 5), Err(LabError::Argument(_))));
    }

    #[test]
    fn geometric_derivative_matches_finite_differences() {
        let f = BernsteinSpec::geometric_stable(1.0).unwrap();
        let analytic = f.deriv(0.5, 1).unwrap();
        let g = |x: f64| f.eval_unchecked(x);
        let fd = (g(0.5 + 1e-6) - g(0.5 - 1e-6)) / 2e-6;
        assert!((analytic - 2.0 / 3.0).abs() < 1e-15);
        assert!((fd - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn jet_derivatives_agree_with_finite_differences() {
        for spec in catalog() {
            let g = |x: f64| spec.eval_unchecked(x);
            for &l in &[0.3, 1.0, 7.0] {
                for k in 1..=4 {
                    let exact = spec.deriv(l, k).unwrap();
                    let fd = richardson_derivative(&g, l, k);
                    let scale = exact.abs().max(spec.eval_unchecked(l) / l.powi(k as i32)).max(1e-3);
                    assert!(
                        (exact - fd).abs() / scale < 1e-4,
                        "{} λ={l} k={k}: jet {exact} vs fd {fd}",
                        spec.label()
                    );
                }
            }
        }
    }

    #[test]
    fn custom_uses_finite_differences() {
        let f = BernsteinSpec::custom_fn("sqrt", |x: f64| x.sqrt());
        assert!((f.deriv(1.0, 1).unwrap() - 0.5).abs() < 1e-9);
        assert!((f.deriv(1.0, 2).unwrap() + 0.25).abs() < 1e-6);
    }

    #[test]
    fn inverse_examples() {
        let f = BernsteinSpec::stable_pow(1.0).unwrap();
        assert!((f.inverse(2.0).unwrap() - 4.0).abs() < 1e-14);
        let m = BernsteinSpec::mixed_stable(0.5, 1.0).unwrap();
        assert!((m.inverse(2.0).unwrap() - 1.0).abs() < 1e-12);
        let g = BernsteinSpec::geometric_stable(1.0).unwrap();
        assert!((g.inverse(1.0).unwrap() - 1.718_281_828_459_045).abs() < 1e-14);
    }

    #[test]
    fn inverse_round_trip_all_families() {
        for spec in catalog() {
            for &l in &[1e-2, 1.0, 1e2] {
                let back = spec.inverse(spec.eval(l).unwrap()).unwrap();
                assert!((back - l).abs() / l < 1e-10, "{}: {l} -> {back}", spec.label());
            }
        }
    }

    #[test]
    fn inverse_reports_non_onto_function() {
        // bounded function never reaches level 2
        let f = BernsteinSpec::custom_fn("bounded", |x: f64| 1.0 - (-x).exp());
        assert!(matches!(f.inverse(2.0), Err(LabError::NonConvergence(_))));
    }

    #[test]
    fn numeric_inverse_of_custom_without_inverse() {
        let f = BernsteinSpec::custom_fn("sqrt", |x: f64| x.sqrt());
        assert!((f.inverse(3.0).unwrap() - 9.0).abs() < 1e-10);
    }

    #[test]
    fn fprime_at_zero_examples() {
        assert!(BernsteinSpec::stable_pow(1.0).unwrap().fprime_at_zero().is_infinite());
        assert_eq!(BernsteinSpec::relativistic(1.0, 1.0).unwrap().fprime_at_zero(), SlopeAtZero::Finite(0.5));
        assert_eq!(BernsteinSpec::log_stable(1.0).unwrap().fprime_at_zero(), SlopeAtZero::Finite(1.0));
    }

    #[test]
    fn relativistic_fprime_matches_finite_differences() {
        let f = BernsteinSpec::relativistic(1.0, 1.0).unwrap();
        let g = |x: f64| f.eval_unchecked(x);
        let fd = (g(2e-8) - g(1e-8)) / 1e-8;
        assert!((fd - 0.5).abs() < 1e-6);
    }

    #[test]
    fn fprime_dichotomy_per_family() {
        let infinite = [
            BernsteinSpec::stable_pow(1.2).unwrap(),
            BernsteinSpec::mixed_stable(0.3, 1.7).unwrap(),
            BernsteinSpec::log_up(1.0, 0.9).unwrap(),
            BernsteinSpec::log_down(1.8, 0.5).unwrap(),
            BernsteinSpec::geometric_stable(0.7).unwrap(),
        ];
        for spec in &infinite {
            assert!(spec.fprime_at_zero().is_infinite(), "{}", spec.label());
            // closed form check: derivative blows up as λ → 0
            assert!(spec.deriv(1e-10, 1).unwrap() > 1.5 * spec.deriv(1e-4, 1).unwrap());
        }
        let finite = [
            BernsteinSpec::relativistic(0.7, 3.0).unwrap(),
            BernsteinSpec::log_stable(0.4).unwrap(),
            BernsteinSpec::linear(2.0).unwrap(),
            BernsteinSpec::geometric_stable(1.0).unwrap(),
        ];
        for spec in &finite {
            let v = spec.fprime_at_zero().finite().expect("finite");
            let near = spec.deriv(1e-9, 1).unwrap();
            assert!((near - v).abs() / v < 1e-3, "{}: {near} vs {v}", spec.label());
        }
    }

    #[test]
    fn custom_fprime_heuristic() {
        let sqrt = BernsteinSpec::custom_fn("sqrt", |x: f64| x.sqrt());
        assert!(sqrt.fprime_at_zero().is_infinite());
        let log = BernsteinSpec::custom_fn("log1p", |x: f64| x.ln_1p());
        let v = log.fprime_at_zero().finite().unwrap();
        assert!((v - 1.0).abs() < 1e-5);
    }

    #[test]
    fn complete_monotone_examples() {
        let f = BernsteinSpec::stable_pow(0.5).unwrap();
        assert!(f.check_complete_monotone(&[0.1, 1.0, 10.0], 4).unwrap().pass);
        let sq = BernsteinSpec::custom_fn("square", |x: f64| x * x);
        let r = sq.check_complete_monotone(&[1.0], 2).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_at, Some((1.0, 2)));
        let rel = BernsteinSpec::relativistic(1.5, 2.0).unwrap();
        assert!(rel.check_complete_monotone(&[0.01, 0.1, 1.0, 10.0, 100.0], 3).unwrap().pass);
    }

    #[test]
    fn complete_monotone_finite_difference_oracle_relativistic() {
        // the custom (finite-difference) path must agree with the catalog path
        let rel = BernsteinSpec::relativistic(1.5, 2.0).unwrap();
        let r2 = rel.clone();
        let custom = BernsteinSpec::custom_fn("relativistic-fd", move |x| r2.eval_unchecked(x));
        let grid = [0.01, 0.1, 1.0, 10.0, 100.0];
        assert!(custom.check_complete_monotone(&grid, 3).unwrap().pass);
    }

    #[test]
    fn catalog_invariants() {
        let grid = log_grid(1e-3, 1e3, 20);
        for spec in catalog() {
            for &l in &[1e-3, 1e-1, 1.0, 10.0, 1e3] {
                assert!(spec.eval(l).unwrap() > 0.0);
                assert!(spec.deriv(l, 1).unwrap() > 0.0);
                assert!(spec.deriv(l, 2).unwrap() <= 1e-12, "{} at {l}", spec.label());
            }
            let r = spec.check_complete_monotone(&grid, 4).unwrap();
            assert!(r.pass, "{}: {:?}", spec.label(), r);
        }
    }

    #[test]
    fn doubling_examples() {
        let grid = default_doubling_grid();
        let st = BernsteinSpec::stable_pow(1.0).unwrap().doubling_diagnostic(&grid).unwrap();
        assert!(st.ratios.iter().all(|r| (r.1 - 4.0).abs() < 1e-12));
        assert!((st.sufficient_c.unwrap() - 4.0).abs() < 1e-12);
        let lin = BernsteinSpec::linear(1.0).unwrap().doubling_diagnostic(&grid).unwrap();
        assert!((lin.limsup_estimate - 2.0).abs() < 1e-12);
        let geo = BernsteinSpec::geometric_stable(1.0).unwrap().doubling_diagnostic(&grid).unwrap();
        // (e^{2s}-1)/(e^s-1) = e^s + 1 → 2
        assert!((geo.limsup_estimate - 2.0).abs() < 1e-5);
        assert!(geo.ratios.iter().all(|&(s, r)| (r - (s.exp() + 1.0)).abs() < 1e-9));
    }

    #[test]
    fn doubling_rejects_increasing_grid() {
        let f = BernsteinSpec::linear(1.0).unwrap();
        assert!(f.doubling_diagnostic(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn levy_density_reproduces_bernstein_function() {
        use crate::quad::{integrate_to_infinity, TailOptions};
        for spec in [
            BernsteinSpec::stable_pow(1.0).unwrap(),
            BernsteinSpec::relativistic(1.0, 1.0).unwrap(),
            BernsteinSpec::geometric_stable(1.0).unwrap(),
        ] {
            let mu = spec.levy_density().unwrap();
            let lambda = 2.0;
            // ∫ (1 - e^{-λs}) μ(ds), with s = e^v
            let q = integrate_to_infinity(
                |v: f64| {
                    let a = (-v).exp();
                    let b = v.exp();
                    (-(-lambda * a).exp_m1()) * mu(a) * a + (-(-lambda * b).exp_m1()) * mu(b) * b
                },
                0.0,
                TailOptions::default(),
            )
            .unwrap();
            let f = spec.eval(lambda).unwrap();
            assert!((q.value - f).abs() / f < 1e-8, "{}: {} vs {f}", spec.label(), q.value);
        }
    }

    #[test]
    fn descriptor_json_round_trip() {
        let fam: Family = serde_json::from_str(r#"{"family":"relativistic","alpha":1.0,"m":1.0}"#).unwrap();
        assert_eq!(fam, Family::Relativistic { alpha: 1.0, m: 1.0 });
        assert!(serde_json::from_str::<Family>(r#"{"family":"stable_pow","alpha":1.0,"beta":2}"#).is_err());
    }
}
