//! Experiment configuration, read from JSON. Unknown fields are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bernstein::{BernsteinSpec, Family};
use crate::bounds::PrefactorMode;
use crate::error::{LabError, Result};
use crate::subordinators::StrategyName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// `tv_bound_subordinate` along the time grid.
    BoundCurve,
    /// `2 P(T^X > t)` for the reflection-subordinate coupling, against the bound.
    CouplingSurvival,
    /// Exact TV from the density, sandwiched by the half-space and upper bounds.
    TvSharpness,
    /// Coordinatewise coupling of a product process.
    ProductCoupling,
    /// TV of `Y + B^f` against TV of `B^f` for an independent compound Poisson `Y`.
    DecompositionDomination,
    /// Empirical TV decay of a one-dimensional truncated stable process.
    TruncatedStableSlope,
    /// Monte-Carlo Laplace-transform check of a sampler.
    LaplaceValidation,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BoundCurve => "bound-curve",
            ExperimentKind::CouplingSurvival => "coupling-survival",
            ExperimentKind::TvSharpness => "tv-sharpness",
            ExperimentKind::ProductCoupling => "product-coupling",
            ExperimentKind::DecompositionDomination => "decomposition-domination",
            ExperimentKind::TruncatedStableSlope => "truncated-stable-slope",
            ExperimentKind::LaplaceValidation => "laplace-validation",
        }
    }
}

/// Lévy density `c |z|^{-1-α}` on `0 < |z| ≤ r`, simulated with jumps below
/// `epsilon` replaced by a Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncatedConfig {
    pub alpha: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

/// Compound Poisson part `Y` for decomposition runs: jumps `±size` along a
/// uniformly chosen coordinate at total rate `rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    #[serde(default = "one")]
    pub rate: f64,
    #[serde(default = "one")]
    pub size: f64,
}

impl Default for JumpConfig {
    fn default() -> Self {
        JumpConfig { rate: 1.0, size: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Random-stream namespace; defaults to the kind name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<Family>,
    /// Per-coordinate specs for product runs (default: `spec` in every coordinate).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub specs: Vec<Family>,
    #[serde(default)]
    pub strategy: StrategyName,
    pub t_grid: Vec<f64>,
    #[serde(default = "origin")]
    pub x: Vec<f64>,
    #[serde(default = "unit")]
    pub y: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub prefactor_mode: PrefactorMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<TruncatedConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Histogram bin width for empirical TV (default: data-driven).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    #[serde(default)]
    pub output: OutputPaths,
}

fn one() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    crate::subordinators::DEFAULT_EPSILON
}
fn origin() -> Vec<f64> {
    vec![0.0]
}
fn unit() -> Vec<f64> {
    vec![1.0]
}
fn default_n() -> usize {
    100_000
}
fn default_tol() -> f64 {
    1e-3
}

impl ExperimentConfig {
    /// A config with defaults for everything but the kind, spec and grid.
    pub fn new(kind: ExperimentKind, spec: Option<Family>, t_grid: Vec<f64>) -> Self {
        ExperimentConfig {
            kind,
            id: None,
            spec,
            specs: Vec::new(),
            strategy: StrategyName::Auto,
            t_grid,
            x: origin(),
            y: unit(),
            n: default_n(),
            seed: 0,
            tol: default_tol(),
            prefactor_mode: PrefactorMode::Corrected,
            jumps: None,
            truncated: None,
            lambdas: None,
            bin_width: None,
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn experiment_id(&self) -> &str {
        self.id.as_deref().unwrap_or(self.kind.name())
    }

    pub fn build_spec(&self) -> Result<BernsteinSpec> {
        match self.spec {
            Some(f) => BernsteinSpec::new(f),
            None => Err(LabError::Config(format!("{} needs a `spec`", self.kind.name()))),
        }
    }

    /// Per-coordinate specs for product runs.
    pub fn build_specs(&self) -> Result<Vec<BernsteinSpec>> {
        if self.specs.is_empty() {
            let s = self.build_spec()?;
            Ok(vec![s; self.x.len()])
        } else {
            self.specs.iter().map(|f| BernsteinSpec::new(*f)).collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.t_grid.is_empty() {
            return bad("t_grid must not be empty".into());
        }
        if self.t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("t_grid entries must be positive and finite".into());
        }
        if self.t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("t_grid must be strictly increasing".into());
        }
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if self.x.is_empty() || self.x.len() != self.y.len() {
            return bad("x and y must be nonempty with equal dimension".into());
        }
        if self.x.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return bad("x and y must be finite".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("tol must lie in (0, 1)".into());
        }
        if let Some(w) = self.bin_width {
            if !(w > 0.0 && w.is_finite()) {
                return bad("bin_width must be positive".into());
            }
        }
        match self.kind {
            ExperimentKind::TruncatedStableSlope => {
                let Some(tr) = self.truncated else {
                    return bad("truncated-stable-slope needs a `truncated` block".into());
                };
                if !(tr.alpha > 0.0 && tr.alpha < 2.0 && tr.c > 0.0 && tr.r > 0.0 && tr.epsilon > 0.0) {
                    return bad("truncated needs alpha in (0,2) and positive c, r, epsilon".into());
                }
                if self.x.len() != 1 {
                    return bad("truncated-stable-slope is one-dimensional".into());
                }
            }
            ExperimentKind::ProductCoupling => {
                let specs = self.build_specs()?;
                if specs.len() != self.x.len() {
                    return bad(format!("{} specs for dimension {}", specs.len(), self.x.len()));
                }
            }
            ExperimentKind::TvSharpness => {
                self.build_spec()?;
                if self.x.len() != 1 {
                    return bad("tv-sharpness is one-dimensional".into());
                }
                if matches!(self.spec, Some(Family::GeometricStable { .. })) && self.t_grid[0] < 1.0 {
                    return bad("exact TV for geometric_stable is restricted to t ≥ 1".into());
                }
            }
            ExperimentKind::LaplaceValidation => {
                self.build_spec()?;
                if self.n < 10_000 {
                    return bad("laplace-validation needs n ≥ 10000".into());
                }
                if let Some(l) = &self.lambdas {
                    if l.is_empty() || l.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                        return bad("lambdas must be positive".into());
                    }
                }
            }
            _ => {
                self.build_spec()?;
            }
        }
        if let Some(j) = self.jumps {
            if !(j.rate >= 0.0 && j.rate.is_finite() && j.size.is_finite()) {
                return bad("jumps need a finite nonnegative rate and finite size".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "kind": "coupling-survival",
        "spec": {"family": "stable_pow", "alpha": 1.0},
        "t_grid": [5, 10, 20],
        "n": 1000,
        "seed": 42
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.kind, ExperimentKind::CouplingSurvival);
        assert_eq!(c.x, vec![0.0]);
        assert_eq!(c.y, vec![1.0]);
        assert_eq!(c.prefactor_mode, PrefactorMode::Corrected);
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = MINIMAL.replace("\"n\": 1000", "\"n\": 1000, \"bogus\": 1");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(LabError::Config(_))));
        let text = MINIMAL.replace("\"alpha\": 1.0", "\"alpha\": 1.0, \"beta\": 2");
        assert!(ExperimentConfig::from_json(&text).is_err());
        let text = MINIMAL.replace("\"n\": 1000", "\"n\": 1000, \"strategy\": {\"strategy\": \"exact_stable\", \"epsilon\": 1}");
        assert!(ExperimentConfig::from_json(&text).is_err());
        let text = MINIMAL.replace("coupling-survival", "coupling-magic");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_json(&MINIMAL.replace("[5, 10, 20]", "[5, 5, 20]")).is_err());
        assert!(ExperimentConfig::from_json(&MINIMAL.replace("\"n\": 1000", "\"n\": 0")).is_err());
        assert!(ExperimentConfig::from_json(&MINIMAL.replace("1.0}", "3.0}")).is_err());
        let big_seed = MINIMAL.replace("42", "18446744073709551615");
        assert_eq!(ExperimentConfig::from_json(&big_seed).unwrap().seed, u64::MAX);
    }
}
