//! Random-variate generation for subordinators: increments, paths, first
//! passage over a level, and a Laplace-transform self-check.

mod jumps;
mod stable;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bernstein::{BernsteinSpec, Family, RealFn};
use crate::error::{LabError, Result};
use crate::quad::{integrate_to_infinity, QuadOptions, TailOptions};
use crate::special::gamma;

pub use jumps::JumpTable;
pub use stable::positive_stable;

/// Proposal cap for one tempered-stable increment.
pub const MAX_PROPOSALS: u64 = 10_000_000;
/// Increment-draw cap for one first-passage simulation.
pub const MAX_PASSAGE_STEPS: u64 = 1_000_000_000;
/// Default small-jump cutoff for compound-Poisson approximations.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// First step of the first-passage walk, relative to the natural time scale.
const GEOMETRIC_START: f64 = 1.0 / (1u64 << 24) as f64;

/// Strategy selector, as named in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "strategy", rename_all = "snake_case", try_from = "StrategyRepr")]
pub enum StrategyName {
    /// Pick the exact strategy for the family when one exists.
    #[default]
    Auto,
    ExactStable,
    ExactGamma,
    TemperedStableRejection,
    DriftOnly,
    SumOfComponents,
    CompoundPoissonApprox { epsilon: f64 },
}

/// Flat form read from configuration files. Internally tagged enums do not
/// reject stray fields on unit variants, so the check is done by hand.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyRepr {
    strategy: String,
    epsilon: Option<f64>,
}

impl TryFrom<StrategyRepr> for StrategyName {
    type Error = String;

    fn try_from(r: StrategyRepr) -> std::result::Result<Self, String> {
        let unit = match r.strategy.as_str() {
            "compound_poisson_approx" => {
                let epsilon = r.epsilon.ok_or("compound_poisson_approx needs `epsilon`")?;
                return Ok(StrategyName::CompoundPoissonApprox { epsilon });
            }
            "auto" => StrategyName::Auto,
            "exact_stable" => StrategyName::ExactStable,
            "exact_gamma" => StrategyName::ExactGamma,
            "tempered_stable_rejection" => StrategyName::TemperedStableRejection,
            "drift_only" => StrategyName::DriftOnly,
            "sum_of_components" => StrategyName::SumOfComponents,
            other => return Err(format!("unknown strategy `{other}`")),
        };
        match r.epsilon {
            Some(_) => Err(format!("strategy `{}` takes no `epsilon`", r.strategy)),
            None => Ok(unit),
        }
    }
}

/// How increments are generated.
#[derive(Clone)]
pub enum Strategy {
    /// `E e^{-λS_t} = e^{-tλ^index}`.
    ExactStable { index: f64 },
    /// Gamma(t, 1) increments.
    ExactGamma,
    /// Stable(`index`) proposals tilted by `e^{-tilt·S}`; `rate` is the
    /// log-acceptance per unit time (`tilt^index`).
    TemperedStableRejection { index: f64, tilt: f64, rate: f64 },
    DriftOnly { b: f64 },
    SumOfComponents(Vec<SubordinatorSampler>),
    /// Jumps above `epsilon` exactly, jumps below replaced by their mean.
    CompoundPoissonApprox { epsilon: f64, drift_compensation: f64, jumps: JumpTable },
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::ExactStable { index } => write!(f, "ExactStable({index})"),
            Strategy::ExactGamma => write!(f, "ExactGamma"),
            Strategy::TemperedStableRejection { index, tilt, .. } => {
                write!(f, "TemperedStableRejection({index}, tilt {tilt})")
            }
            Strategy::DriftOnly { b } => write!(f, "DriftOnly({b})"),
            Strategy::SumOfComponents(c) => f.debug_tuple("SumOfComponents").field(c).finish(),
            Strategy::CompoundPoissonApprox { epsilon, drift_compensation, jumps } => write!(
                f,
                "CompoundPoissonApprox(ε {epsilon}, drift {drift_compensation}, rate {})",
                jumps.rate()
            ),
        }
    }
}

/// An immutable sampler for the subordinator with Laplace exponent `spec`.
#[derive(Debug, Clone)]
pub struct SubordinatorSampler {
    spec: BernsteinSpec,
    strategy: Strategy,
}

/// Outcome of [`SubordinatorSampler::first_passage`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstPassageResult {
    /// Right end of the final bracket (or the horizon when censored).
    pub time: f64,
    /// Path value at the left end of the final bracket.
    pub pre_level: f64,
    /// Path value at `time`.
    pub post_level: f64,
    /// Width of the final bracket.
    pub step: f64,
    /// The level was not reached before the horizon.
    pub censored: bool,
}

/// Result of [`SubordinatorSampler::validate_laplace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceCheck {
    pub lambda: f64,
    pub t: f64,
    pub mc_mean: f64,
    pub target: f64,
    /// Sample standard error of the mean.
    pub stderr: f64,
    /// Standard error implied by the target law,
    /// `√((e^{-t f(2λ)} − e^{-2t f(λ)}) / n)`.
    pub null_stderr: f64,
    pub n: usize,
    pub pass: bool,
}

/// Options for [`SubordinatorSampler::first_passage_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageOptions {
    /// Relative bracket width at which refinement stops.
    pub tol: f64,
    /// Stop and report a censored result once this time is reached.
    pub horizon: Option<f64>,
    /// Cap on increment draws.
    pub max_steps: u64,
}

impl PassageOptions {
    pub fn new(tol: f64) -> Self {
        PassageOptions { tol, horizon: None, max_steps: MAX_PASSAGE_STEPS }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }
}

fn mismatch(name: &str, spec: &BernsteinSpec) -> LabError {
    LabError::Argument(format!("strategy {name} does not apply to {}", spec.label()))
}

fn stable_levy_constant(a: f64) -> f64 {
    a / gamma(1.0 - a)
}

impl SubordinatorSampler {
    /// Sampler with the default strategy for the family.
    pub fn exact(spec: BernsteinSpec) -> Result<Self> {
        Self::new(spec, StrategyName::Auto)
    }

    pub fn new(spec: BernsteinSpec, name: StrategyName) -> Result<Self> {
        let family = spec.family().copied();
        let strategy = match (name, family) {
            (StrategyName::Auto | StrategyName::ExactStable, Some(Family::StablePow { alpha })) => {
                Strategy::ExactStable { index: alpha / 2.0 }
            }
            (StrategyName::Auto | StrategyName::ExactGamma, Some(Family::GeometricStable { alpha }))
            | (StrategyName::Auto | StrategyName::ExactGamma, Some(Family::LogStable { alpha }))
                if alpha == 1.0 =>
            {
                Strategy::ExactGamma
            }
            (
                StrategyName::Auto | StrategyName::TemperedStableRejection,
                Some(Family::Relativistic { alpha, m }),
            ) => {
                let index = alpha / 2.0;
                Strategy::TemperedStableRejection { index, tilt: m.powf(2.0 / alpha), rate: m }
            }
            (StrategyName::Auto | StrategyName::DriftOnly, Some(Family::Linear { b })) => Strategy::DriftOnly { b },
            (StrategyName::Auto | StrategyName::SumOfComponents, Some(Family::MixedStable { alpha, beta })) => {
                Strategy::SumOfComponents(vec![
                    Self::new(BernsteinSpec::stable_pow(alpha)?, StrategyName::ExactStable)?,
                    Self::new(BernsteinSpec::stable_pow(beta)?, StrategyName::ExactStable)?,
                ])
            }
            (StrategyName::CompoundPoissonApprox { epsilon }, _) => Self::compound_poisson(&spec, epsilon)?,
            (StrategyName::Auto, None) if spec.custom_parts().and_then(|c| c.levy_density.as_ref()).is_some() => {
                Self::compound_poisson(&spec, DEFAULT_EPSILON)?
            }
            (StrategyName::Auto, _) => {
                return Err(LabError::Argument(format!("no sampler available for {}", spec.label())))
            }
            (other, _) => return Err(mismatch(&format!("{other:?}"), &spec)),
        };
        Ok(SubordinatorSampler { spec, strategy })
    }

    fn compound_poisson(spec: &BernsteinSpec, epsilon: f64) -> Result<Strategy> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(LabError::Argument("compound-Poisson cutoff must be positive".into()));
        }
        let density = spec
            .levy_density()
            .ok_or_else(|| LabError::Argument(format!("{} has no Lévy density", spec.label())))?;
        if let Some(Family::StablePow { alpha }) = spec.family() {
            let a = alpha / 2.0;
            let c = stable_levy_constant(a);
            return Ok(Strategy::CompoundPoissonApprox {
                epsilon,
                drift_compensation: c * epsilon.powf(1.0 - a) / (1.0 - a),
                jumps: JumpTable::power_law(c, a, epsilon, f64::INFINITY)?,
            });
        }
        Ok(Strategy::CompoundPoissonApprox {
            epsilon,
            drift_compensation: small_jump_mean(&density, epsilon)?,
            jumps: JumpTable::tabulate(&density, epsilon, f64::INFINITY)?,
        })
    }

    pub fn spec(&self) -> &BernsteinSpec {
        &self.spec
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    /// `true` when increments are deterministic.
    pub fn is_deterministic(&self) -> bool {
        matches!(self.strategy, Strategy::DriftOnly { .. })
    }

    /// One draw of `S_t`.
    pub fn sample_increment<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(LabError::Argument(format!("increment length must be positive, got {t}")));
        }
        Ok(match &self.strategy {
            Strategy::ExactStable { index } => t.powf(1.0 / index) * positive_stable(*index, rng),
            Strategy::ExactGamma => Gamma::new(t, 1.0)
                .map_err(|e| LabError::Argument(e.to_string()))?
                .sample(rng),
            Strategy::TemperedStableRejection { index, tilt, rate } => {
                tempered_increment(*index, *tilt, *rate, t, rng)?
            }
            Strategy::DriftOnly { b } => b * t,
            Strategy::SumOfComponents(parts) => {
                let mut s = 0.0;
                for p in parts {
                    s += p.sample_increment(t, rng)?;
                }
                s
            }
            Strategy::CompoundPoissonApprox { drift_compensation, jumps, .. } => {
                let count = poisson(jumps.rate() * t, rng)?;
                let mut s = drift_compensation * t;
                for _ in 0..count {
                    s += jumps.sample(rng);
                }
                s
            }
        })
    }

    /// Path values on a strictly increasing grid of positive times.
    pub fn sample_path<R: Rng + ?Sized>(&self, grid: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        check_grid(grid)?;
        let mut out = Vec::with_capacity(grid.len());
        let (mut prev_t, mut s) = (0.0, 0.0);
        for &t in grid {
            s += self.sample_increment(t - prev_t, rng)?;
            out.push(s);
            prev_t = t;
        }
        Ok(out)
    }

    /// First time the path reaches `level`, located to relative precision `tol`.
    pub fn first_passage<R: Rng + ?Sized>(&self, level: f64, tol: f64, rng: &mut R) -> Result<FirstPassageResult> {
        self.first_passage_with(level, PassageOptions::new(tol), rng)
    }

    /// First passage with explicit options.
    ///
    /// The path is walked forward until an increment crosses, with steps
    /// doubling from a tiny fraction of the natural time scale `1/f(1/level)`
    /// up to that scale and uniform afterwards, so a bracket is never much
    /// wider than its left end. The bracket is then
    /// halved repeatedly: the two half-increments are drawn independently
    /// and kept only if their sum still crosses, which samples them from
    /// their exact joint law given the crossing. The half that contains the
    /// crossing becomes the new bracket. Only independent increments are
    /// used, so this works for every strategy.
    pub fn first_passage_with<R: Rng + ?Sized>(
        &self,
        level: f64,
        opts: PassageOptions,
        rng: &mut R,
    ) -> Result<FirstPassageResult> {
        if !(level > 0.0 && level.is_finite()) {
            return Err(LabError::Argument(format!("passage level must be positive, got {level}")));
        }
        if !(opts.tol > 0.0 && opts.tol < 0.5) {
            return Err(LabError::Argument(format!("tol must lie in (0, 0.5), got {}", opts.tol)));
        }
        let horizon = opts.horizon.unwrap_or(f64::INFINITY);
        if !(horizon > 0.0) {
            return Err(LabError::Argument("horizon must be positive".into()));
        }
        if let Strategy::DriftOnly { b } = self.strategy {
            let time = level / b;
            if time > horizon {
                let s = b * horizon;
                return Ok(FirstPassageResult { time: horizon, pre_level: s, post_level: s, step: 0.0, censored: true });
            }
            return Ok(FirstPassageResult {
                time,
                pre_level: level.next_down(),
                post_level: level,
                step: 0.0,
                censored: false,
            });
        }

        let mut steps: u64 = 0;
        let mut draw = |h: f64, rng: &mut R| -> Result<f64> {
            steps += 1;
            if steps > opts.max_steps {
                return Err(LabError::Budget(format!(
                    "first passage over {level} exceeded {} increment draws",
                    opts.max_steps
                )));
            }
            self.sample_increment(h, rng)
        };

        // natural time scale of the passage
        let mut scale = 1.0 / self.spec.eval(1.0 / level)?;
        if !(scale > 0.0 && scale.is_finite()) {
            scale = 1.0;
        }
        let mut h = scale * GEOMETRIC_START;
        let (mut u, mut s) = (0.0, 0.0);
        let mut post;
        loop {
            let w = h.min(horizon - u);
            let d = draw(w, rng)?;
            if s + d >= level {
                h = w;
                post = s + d;
                break;
            }
            u += w;
            s += d;
            if u >= horizon {
                return Ok(FirstPassageResult { time: horizon, pre_level: s, post_level: s, step: w, censored: true });
            }
            if h < scale {
                h *= 2.0;
            }
        }
        while h > opts.tol * (u + h) {
            let half = h / 2.0;
            let (d1, d2) = loop {
                let d1 = draw(half, rng)?;
                let d2 = draw(half, rng)?;
                if s + d1 + d2 >= level {
                    break (d1, d2);
                }
            };
            if s + d1 >= level {
                post = s + d1;
            } else {
                u += half;
                s += d1;
                post = s + d2;
            }
            h = half;
        }
        Ok(FirstPassageResult { time: u + h, pre_level: s, post_level: post, step: h, censored: false })
    }

    /// Monte-Carlo check of `E e^{-λ S_t} = e^{-t f(λ)}` at three standard errors.
    ///
    /// The larger of the sample and the null standard error is used: when
    /// `e^{t(2f(λ) − f(2λ))}` is large compared with `n`, the mean is carried
    /// by events too rare to appear in the sample and the sample error is
    /// badly underestimated, while the null error stays exact.
    pub fn validate_laplace<R: Rng + ?Sized>(&self, lambda: f64, t: f64, n: usize, rng: &mut R) -> Result<LaplaceCheck> {
        if n < 10_000 {
            return Err(LabError::Argument(format!("Laplace validation needs n ≥ 10000, got {n}")));
        }
        let target = (-t * self.spec.eval(lambda)?).exp();
        if self.is_deterministic() {
            let mc_mean = (-lambda * self.sample_increment(t, rng)?).exp();
            let pass = (mc_mean - target).abs() <= 1e-14 * target;
            return Ok(LaplaceCheck { lambda, t, mc_mean, target, stderr: 0.0, null_stderr: 0.0, n, pass });
        }
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push((-lambda * self.sample_increment(t, rng)?).exp());
        }
        let est = crate::stats::mean_stderr(&values);
        let diff = (est.mean - target).abs();
        let second = (-t * self.spec.eval(2.0 * lambda)?).exp();
        let null_stderr = ((second - target * target).max(0.0) / n as f64).sqrt();
        Ok(LaplaceCheck {
            lambda,
            t,
            mc_mean: est.mean,
            target,
            stderr: est.stderr,
            null_stderr,
            n,
            pass: diff <= 3.0 * est.stderr.max(null_stderr) + 1e-14 * target,
        })
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || !(grid[0] > 0.0) {
        return Err(LabError::Argument("time grid must start after 0".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(LabError::Argument("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let p = Poisson::new(mean).map_err(|e| LabError::Argument(format!("Poisson mean {mean}: {e}")))?;
    Ok(p.sample(rng) as u64)
}

fn tempered_increment<R: Rng + ?Sized>(index: f64, tilt: f64, rate: f64, t: f64, rng: &mut R) -> Result<f64> {
    // acceptance per piece is e^{-rate·t/n} ≥ e^{-1}
    let pieces = (t * rate).ceil().max(1.0);
    if pieces > MAX_PROPOSALS as f64 {
        return Err(LabError::NonConvergence(format!("tempered increment over t = {t} needs {pieces} pieces")));
    }
    let pieces = pieces as u64;
    let dt = t / pieces as f64;
    let scale = dt.powf(1.0 / index);
    let mut total = 0.0;
    let mut proposals: u64 = 0;
    for _ in 0..pieces {
        loop {
            proposals += 1;
            if proposals > MAX_PROPOSALS {
                return Err(LabError::NonConvergence(format!(
                    "tempered-stable rejection exceeded {MAX_PROPOSALS} proposals"
                )));
            }
            let s = scale * positive_stable(index, rng);
            let u: f64 = rng.random();
            if u < (-tilt * s).exp() {
                total += s;
                break;
            }
        }
    }
    Ok(total)
}

/// `∫_0^ε s μ(ds)`, the mean contribution of jumps below the cutoff.
fn small_jump_mean(density: &RealFn, epsilon: f64) -> Result<f64> {
    // s = ε e^{-v}: ds = s dv
    let f = |v: f64| {
        let s = epsilon * (-v).exp();
        if s == 0.0 {
            0.0
        } else {
            s * s * density(s)
        }
    };
    let q = integrate_to_infinity(f, 0.0, TailOptions { panel: QuadOptions::default(), ..TailOptions::default() })?;
    Ok(q.value)
}

/// Symmetric one-dimensional Lévy density restricted to `|z| ≤ r`.
#[derive(Clone)]
pub enum SymmetricLevyDensity {
    /// `c |z|^{-1-α}` on `0 < |z| ≤ r`.
    TruncatedStable { c: f64, alpha: f64, r: f64 },
    /// An arbitrary even density given on `z > 0`, vanishing beyond `r`.
    Custom { density: RealFn, r: f64 },
}

impl fmt::Debug for SymmetricLevyDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TruncatedStable { c, alpha, r } => write!(f, "TruncatedStable(c {c}, α {alpha}, r {r})"),
            Self::Custom { r, .. } => write!(f, "Custom(r {r})"),
        }
    }
}

impl SymmetricLevyDensity {
    pub fn truncated_stable(c: f64, alpha: f64, r: f64) -> Self {
        Self::TruncatedStable { c, alpha, r }
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(density: F, r: f64) -> Self {
        Self::Custom { density: Arc::new(density), r }
    }

    /// Density at `z`.
    pub fn eval(&self, z: f64) -> f64 {
        let a = z.abs();
        match self {
            Self::TruncatedStable { c, alpha, r } => {
                if a == 0.0 || a > *r {
                    0.0
                } else {
                    c * a.powf(-1.0 - alpha)
                }
            }
            Self::Custom { density, r } => {
                if a == 0.0 || a > *r {
                    0.0
                } else {
                    density(a)
                }
            }
        }
    }

    pub fn support(&self) -> f64 {
        match self {
            Self::TruncatedStable { r, .. } | Self::Custom { r, .. } => *r,
        }
    }
}

/// Precomputed compound-Poisson-plus-Gaussian approximation of a symmetric
/// one-dimensional Lévy process without Gaussian part.
#[derive(Debug, Clone)]
pub struct CpLevySampler {
    /// Jumps with `ε ≤ |z| ≤ r`, by absolute size; total rate is twice the
    /// one-sided mass.
    jumps: Option<JumpTable>,
    /// `∫_{|z|<ε} z² ν(dz)`.
    small_variance: f64,
    epsilon: f64,
}

impl CpLevySampler {
    pub fn new(density: &SymmetricLevyDensity, epsilon: f64) -> Result<Self> {
        let r = density.support();
        if !(epsilon > 0.0) {
            return Err(LabError::Argument("cutoff ε must be positive".into()));
        }
        if !r.is_finite() {
            return Err(LabError::Argument("support bound r must be finite".into()));
        }
        let (jumps, small_variance) = match density {
            SymmetricLevyDensity::TruncatedStable { c, alpha, r } => {
                if !(*c > 0.0 && *alpha > 0.0 && *alpha < 2.0) {
                    return Err(LabError::Argument("truncated stable needs c > 0 and α in (0, 2)".into()));
                }
                let e = epsilon.min(*r);
                let jumps = if epsilon < *r {
                    Some(JumpTable::power_law(2.0 * c, *alpha, epsilon, *r)?)
                } else {
                    None
                };
                (jumps, 2.0 * c * e.powf(2.0 - alpha) / (2.0 - alpha))
            }
            SymmetricLevyDensity::Custom { density: d, r } => {
                let jumps = if epsilon < *r {
                    let two: RealFn = {
                        let d = d.clone();
                        Arc::new(move |z| 2.0 * d(z))
                    };
                    Some(JumpTable::tabulate(&two, epsilon, *r)?)
                } else {
                    None
                };
                let e = epsilon.min(*r);
                let d2 = d.clone();
                let f = move |v: f64| {
                    let z = e * (-v).exp();
                    if z == 0.0 {
                        0.0
                    } else {
                        2.0 * z * z * z * d2(z)
                    }
                };
                let var = integrate_to_infinity(f, 0.0, TailOptions::default())?.value;
                (jumps, var)
            }
        };
        if !small_variance.is_finite() {
            return Err(LabError::Argument("second moment of small jumps is infinite".into()));
        }
        Ok(CpLevySampler { jumps, small_variance, epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Total jump rate of the retained (large) jumps.
    pub fn jump_rate(&self) -> f64 {
        self.jumps.as_ref().map_or(0.0, JumpTable::rate)
    }

    /// `∫_{|z|<ε} z² ν(dz)`.
    pub fn small_jump_variance(&self) -> f64 {
        self.small_variance
    }

    /// One draw of the increment over time `t`.
    pub fn sample<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<f64> {
        let (x, _) = self.sample_counting(t, rng)?;
        Ok(x)
    }

    /// Increment together with the number of large jumps.
    pub fn sample_counting<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<(f64, u64)> {
        if !(t > 0.0) {
            return Err(LabError::Argument(format!("t must be positive, got {t}")));
        }
        let mut x = 0.0;
        let mut count = 0;
        if let Some(j) = &self.jumps {
            count = poisson(j.rate() * t, rng)?;
            for _ in 0..count {
                let z = j.sample(rng);
                x += if rng.random::<bool>() { z } else { -z };
            }
        }
        if self.small_variance > 0.0 {
            let g: f64 = StandardNormal.sample(rng);
            x += (t * self.small_variance).sqrt() * g;
        }
        Ok((x, count))
    }
}

/// One increment over time `t` of the symmetric Lévy process with density
/// `levy_density`: jumps of size at least `epsilon` as a compound Poisson
/// sum, smaller jumps replaced by a centered Gaussian of matching variance.
pub fn sample_cp_levy_increment<R: Rng + ?Sized>(
    levy_density: &SymmetricLevyDensity,
    epsilon: f64,
    t: f64,
    rng: &mut R,
) -> Result<f64> {
    CpLevySampler::new(levy_density, epsilon)?.sample(t, rng)
}

#[cfg(test)]
mod tests;
