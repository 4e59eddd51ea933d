//! Experiment runners, reports and output files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind, JumpConfig};
use super::par::{try_replicate_map, with_threads};
use super::rng::{experiment_hash, make_rng_stream};
use super::slope::{fit_loglog_slope, SlopeFit};
use crate::bernstein::{BernsteinSpec, Family};
use crate::bounds::{
    asymptotic_rate, bound_integral, bound_product, c_constant, lower_bound_integral, tv_bound_subordinate,
    BoundRequest, PrefactorMode,
};
use crate::coupling::{distance, normal, survival_indicators};
use crate::densities::{density_1d, tv_empirical, tv_exact_from_grid, EmpiricalOptions, GridParams, TvEstimate};
use crate::error::{LabError, Result};
use crate::special::erf;
use crate::stats::proportion;
use crate::subordinators::{CpLevySampler, SubordinatorSampler, SymmetricLevyDensity};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "COUPLING_LAB_THREADS";

/// Worker count: `COUPLING_LAB_THREADS` if set, else the available parallelism.
pub fn configured_threads() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n >= 1 => n,
        _ => available,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
    /// Secondary quantities (bounds, oracles, diagnostics) for the JSON report.
    #[serde(flatten)]
    pub extra: BTreeMap<String, f64>,
}

impl Row {
    fn new(t: f64, value: f64, stderr: f64, n: u64) -> Self {
        Row { t, value, stderr, n, extra: BTreeMap::new() }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.extra.insert(key.to_string(), v);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.extra.get(key).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub crate_version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub prefactor_mode: PrefactorMode,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeFit>,
    /// Which column the slope was fitted to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_of: Option<String>,
    pub criteria: Vec<Criterion>,
    pub warnings: Vec<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Every declared criterion passed and the run finished.
    pub pass: bool,
    pub wall_time_s: f64,
    pub environment: Environment,
}

impl ExperimentReport {
    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    /// The rows as CSV (`t,value,stderr,n`), numbers in shortest round-trip form.
    pub fn csv(&self) -> String {
        rows_csv(&self.rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes the CSV and JSON files named in the config, if any.
    pub fn write_outputs(&self) -> Result<()> {
        if let Some(p) = &self.config.output.csv {
            write_file(p, &self.csv())?;
        }
        if let Some(p) = &self.config.output.report {
            write_file(p, &self.to_json())?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn rows_csv(rows: &[Row]) -> String {
    let mut s = String::from("t,value,stderr,n\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", fmt_f64(r.t), fmt_f64(r.value), fmt_f64(r.stderr), r.n);
    }
    s
}

/// Density grid as CSV with header `z,p`.
pub fn density_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from("z,p\n");
    for (z, p) in points {
        let _ = writeln!(s, "{},{}", fmt_f64(*z), fmt_f64(*p));
    }
    s
}

pub fn write_density_csv(points: &[(f64, f64)], path: &Path) -> Result<()> {
    write_file(path, &density_csv(points))
}

/// Runs the experiment with [`configured_threads`] workers.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with_threads(config, configured_threads())
}

/// Runs the experiment on `threads` workers. Configuration errors are
/// returned; failures during the run are recorded in the report, keeping
/// the rows finished before the failure.
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mut out = Outcome::default();
    let result = with_threads(threads, || {
        let ctx = Ctx { cfg: config, out: &mut out };
        ctx.run()
    });
    let (status, error) = match result {
        Ok(()) => (Status::Ok, None),
        Err(e) => (Status::Failed, Some(e.to_string())),
    };
    let pass = status == Status::Ok && out.criteria.iter().all(|c| c.pass);
    Ok(ExperimentReport {
        config: config.clone(),
        prefactor_mode: config.prefactor_mode,
        rows: out.rows,
        slope: out.slope,
        slope_of: out.slope_of,
        criteria: out.criteria,
        warnings: out.warnings,
        status,
        error,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
        environment: Environment {
            crate_version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            threads,
        },
    })
}

#[derive(Default)]
struct Outcome {
    rows: Vec<Row>,
    slope: Option<SlopeFit>,
    slope_of: Option<String>,
    criteria: Vec<Criterion>,
    warnings: Vec<String>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    out: &'a mut Outcome,
}

fn stable_alpha(spec: &Option<Family>) -> Option<f64> {
    match spec {
        Some(Family::StablePow { alpha }) => Some(*alpha),
        _ => None,
    }
}

fn interquartile_range(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| s[((s.len() - 1) as f64 * p).round() as usize];
    q(0.75) - q(0.25)
}

impl Ctx<'_> {
    fn run(mut self) -> Result<()> {
        match self.cfg.kind {
            ExperimentKind::BoundCurve => self.bound_curve(),
            ExperimentKind::CouplingSurvival => self.coupling_survival(),
            ExperimentKind::TvSharpness => self.tv_sharpness(),
            ExperimentKind::ProductCoupling => self.product_coupling(),
            ExperimentKind::DecompositionDomination => self.decomposition(),
            ExperimentKind::TruncatedStableSlope => self.truncated_slope(),
            ExperimentKind::LaplaceValidation => self.laplace(),
        }
    }

    fn h(&self) -> f64 {
        distance(&self.cfg.x, &self.cfg.y)
    }

    fn stream_id(&self) -> u64 {
        experiment_hash(self.cfg.experiment_id())
    }

    fn criterion(&mut self, name: &str, pass: bool, detail: String) {
        self.out.criteria.push(Criterion { name: name.to_string(), pass, detail });
    }

    /// Fits the slope of `column` (`"value"` or an extra) when there are at least 4 rows.
    fn fit(&mut self, column: &str) -> Result<Option<SlopeFit>> {
        if self.out.rows.len() < 4 {
            return Ok(None);
        }
        let t: Vec<f64> = self.out.rows.iter().map(|r| r.t).collect();
        let v: Vec<f64> = self
            .out
            .rows
            .iter()
            .map(|r| if column == "value" { r.value } else { r.get(column).unwrap_or(f64::NAN) })
            .collect();
        match fit_loglog_slope(&t, &v) {
            Ok(f) => {
                self.out.slope = Some(f);
                self.out.slope_of = Some(column.to_string());
                Ok(Some(f))
            }
            Err(e) => {
                self.out.warnings.push(format!("no slope for {column}: {e}"));
                Ok(None)
            }
        }
    }

    fn slope_criterion(&mut self, name: &str, fit: Option<SlopeFit>, target: f64, tol: f64) {
        if let Some(f) = fit {
            let pass = f.within(target, tol);
            self.criterion(name, pass, format!("slope {:.4} vs {target:.4} ± {tol}", f.slope));
        }
    }

    fn bound_curve(&mut self) -> Result<()> {
        let spec = self.cfg.build_spec()?;
        let (h, d, mode) = (self.h(), self.cfg.x.len(), self.cfg.prefactor_mode);
        for &t in &self.cfg.t_grid {
            let req = BoundRequest::new(spec.clone(), t, h).dimension(d).mode(mode);
            let value = tv_bound_subordinate(&req)?;
            let integral = bound_integral(&spec, t, 1.0)?;
            let rate = asymptotic_rate(&spec, t, h)?;
            let mut row = Row::new(t, value, 0.0, 0)
                .with("integral", integral)
                .with("uncapped", mode.value() * h * integral)
                .with("envelope", rate.envelope);
            if let Some(lb) = lower_bound_integral(&spec, t) {
                row = row.with("lower_integral", lb);
            }
            self.out.rows.push(row);
        }
        let t0 = self.cfg.t_grid[0];
        if crate::bounds::bound_integral_report(&spec, t0, 1.0).is_ok_and(|r| r.divergence_warning) {
            let ratios = crate::bounds::growth_ratios(&spec, t0, 1.0);
            self.out.warnings.push(format!("growth proxy t f(r)/log r = {ratios:?} at t = {t0} is near divergence"));
        }
        let fit = self.fit("uncapped")?;
        if let Some(alpha) = stable_alpha(&self.cfg.spec) {
            self.slope_criterion("closed_form_scaling", fit, -1.0 / alpha, 0.01);
        }
        Ok(())
    }

    fn coupling_survival(&mut self) -> Result<()> {
        let spec = self.cfg.build_spec()?;
        let sampler = SubordinatorSampler::new(spec.clone(), self.cfg.strategy)?;
        let (h, grid, n) = (self.h(), self.cfg.t_grid.clone(), self.cfg.n);
        let paths = try_replicate_map(n, self.cfg.seed, self.stream_id(), |rng, _| {
            survival_indicators(&sampler, h, &grid, rng)
        })?;
        let mut counts = vec![0usize; grid.len()];
        for p in &paths {
            for (c, &alive) in counts.iter_mut().zip(p) {
                *c += alive as usize;
            }
        }
        let mut dominated = true;
        let mut detail = String::new();
        for (i, &t) in grid.iter().enumerate() {
            let p = proportion(counts[i], n);
            let (value, se) = (2.0 * p.mean, 2.0 * p.stderr);
            let req = BoundRequest::new(spec.clone(), t, h).dimension(self.cfg.x.len());
            let corrected = tv_bound_subordinate(&req.clone().mode(PrefactorMode::Corrected))?;
            let printed = tv_bound_subordinate(&req.mode(PrefactorMode::AsPrinted))?;
            let bound = if self.cfg.prefactor_mode == PrefactorMode::Corrected { corrected } else { printed };
            if value > bound + 3.0 * se {
                dominated = false;
                let _ = write!(detail, "t={t}: {value:.5} > {bound:.5} + 3·{se:.1e}; ");
            }
            let mut row = Row::new(t, value, se, n as u64)
                .with("bound_corrected", corrected)
                .with("bound_as_printed", printed);
            if let Some(Family::Linear { b }) = self.cfg.spec {
                row = row.with("exact_tv", 2.0 * erf(h / (4.0 * (b * t).sqrt())));
            }
            self.out.rows.push(row);
        }
        let mode = self.cfg.prefactor_mode;
        self.criterion(
            "bound_dominates",
            dominated,
            if dominated { format!("{mode:?} bound + 3σ dominates at every t") } else { detail },
        );
        if matches!(self.cfg.spec, Some(Family::Linear { .. })) {
            let rows = self.out.rows.clone();
            let exact_ok = rows.iter().all(|r| (r.value - r.get("exact_tv").unwrap()).abs() <= 3.0 * r.stderr);
            self.criterion("matches_exact_gaussian_tv", exact_ok, "2P(T>t) against 2 erf(h/(4√(bt)))".into());
            let corrected_ok = rows.iter().all(|r| r.value <= r.get("bound_corrected").unwrap() + 3.0 * r.stderr);
            self.criterion("corrected_dominates", corrected_ok, "1/π prefactor".into());
            let printed_fails = rows.iter().all(|r| r.value > r.get("bound_as_printed").unwrap() + 3.0 * r.stderr);
            self.criterion("as_printed_violated", printed_fails, "1/(√2π) prefactor falls below the exact TV".into());
        }
        if self.out.rows.iter().all(|r| r.value > 0.0) {
            let fit = self.fit("value")?;
            match (stable_alpha(&self.cfg.spec), spec.fprime_at_zero().finite()) {
                (Some(alpha), _) => self.slope_criterion("survival_slope", fit, -1.0 / alpha, 0.15),
                (None, Some(_)) => self.slope_criterion("survival_slope", fit, -0.5, 0.15),
                _ => {}
            }
        }
        Ok(())
    }

    fn tv_sharpness(&mut self) -> Result<()> {
        let spec = self.cfg.build_spec()?;
        let h = self.cfg.y[0] - self.cfg.x[0];
        let alpha = stable_alpha(&self.cfg.spec);
        let mut sandwich = true;
        let mut detail = String::new();
        for &t in &self.cfg.t_grid {
            let grid = density_1d(&spec, t, GridParams::default())?;
            let tv = tv_exact_from_grid(&grid, h)?;
            let lower = grid.half_cdf(h.abs());
            let bound = tv_bound_subordinate(&BoundRequest::new(spec.clone(), t, h.abs()).mode(self.cfg.prefactor_mode))?;
            if lower > tv.value + 1e-3 || tv.value > bound + 1e-3 {
                sandwich = false;
                let _ = write!(detail, "t={t}: {lower:.5} ≤ {:.5} ≤ {bound:.5} fails; ", tv.value);
            }
            let mut row = Row::new(t, tv.value, 0.0, 0)
                .with("direct", tv.direct)
                .with("discrepancy", tv.discrepancy)
                .with("halfspace_lower", lower)
                .with("bound", bound);
            if let Some(a) = alpha {
                row = row.with("scaled_halfspace", lower * t.powf(1.0 / a));
            }
            self.out.rows.push(row);
        }
        self.criterion(
            "sandwich",
            sandwich,
            if sandwich { "half-space ≤ exact ≤ bound within 1e-3".into() } else { detail },
        );
        if let Some(a) = alpha {
            let fit = self.fit("value")?;
            self.slope_criterion("exact_rate", fit, -1.0 / a, 0.05);
            let scaled: Vec<f64> = self.out.rows.iter().filter_map(|r| r.get("scaled_halfspace")).collect();
            let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(l, u), &v| (l.min(v), u.max(v)));
            self.criterion(
                "halfspace_rate",
                lo > 0.0 && lo >= 0.5 * hi,
                format!("t^(1/α)·half-space in [{lo:.5}, {hi:.5}]"),
            );
        }
        Ok(())
    }

    fn product_coupling(&mut self) -> Result<()> {
        let specs = self.cfg.build_specs()?;
        let samplers = specs
            .iter()
            .map(|s| SubordinatorSampler::new(s.clone(), self.cfg.strategy))
            .collect::<Result<Vec<_>>>()?;
        let dists: Vec<f64> = self.cfg.x.iter().zip(&self.cfg.y).map(|(a, b)| (a - b).abs()).collect();
        let (grid, n, d) = (self.cfg.t_grid.clone(), self.cfg.n, dists.len());
        let per = try_replicate_map(n, self.cfg.seed, self.stream_id(), |rng, _| {
            samplers
                .iter()
                .zip(&dists)
                .map(|(s, &h)| survival_indicators(s, h, &grid, rng))
                .collect::<Result<Vec<_>>>()
        })?;
        let mut any = vec![0usize; grid.len()];
        let mut coord = vec![vec![0usize; grid.len()]; d];
        for rep in &per {
            for i in 0..grid.len() {
                let mut alive = false;
                for (j, ind) in rep.iter().enumerate() {
                    coord[j][i] += ind[i] as usize;
                    alive |= ind[i];
                }
                any[i] += alive as usize;
            }
        }
        let (mut dominated, mut product_ok) = (true, true);
        for (i, &t) in grid.iter().enumerate() {
            let pmax = proportion(any[i], n);
            let pj: Vec<_> = coord.iter().map(|c| proportion(c[i], n)).collect();
            let predicted = 1.0 - pj.iter().map(|p| 1.0 - p.mean).product::<f64>();
            let mut var = pmax.stderr * pmax.stderr;
            for j in 0..d {
                let others: f64 = (0..d).filter(|&k| k != j).map(|k| 1.0 - pj[k].mean).product();
                var += (others * pj[j].stderr).powi(2);
            }
            let combined = var.sqrt();
            let bound = bound_product(&specs, t, &dists, d, f64::INFINITY, self.cfg.prefactor_mode)?;
            let (value, se) = (2.0 * pmax.mean, 2.0 * pmax.stderr);
            dominated &= value <= bound + 3.0 * se;
            product_ok &= (pmax.mean - predicted).abs() <= 3.0 * combined;
            let mut row = Row::new(t, value, se, n as u64)
                .with("bound", bound)
                .with("p_max", pmax.mean)
                .with("product_form", predicted)
                .with("combined_stderr", combined)
                .with("c_d", c_constant(d));
            for (j, p) in pj.iter().enumerate() {
                row = row.with(&format!("p_{j}"), p.mean);
            }
            self.out.rows.push(row);
        }
        self.criterion("bound_dominates", dominated, "2P(max T > t) ≤ product bound + 3σ".into());
        self.criterion("max_law", product_ok, "P(max T > t) = 1 − Π(1 − p_j) within 3 combined σ".into());
        Ok(())
    }

    /// Paired-sample empirical TV with bins aligned to the midpoint of `x`, `y`.
    fn empirical(&self, a: &[Vec<f64>], b: &[Vec<f64>], width: f64, stream: usize) -> Result<TvEstimate> {
        let mid: Vec<f64> = self.cfg.x.iter().zip(&self.cfg.y).map(|(p, q)| (p + q) / 2.0).collect();
        let opts = EmpiricalOptions::new(width).origin(mid).paired(true);
        let mut rng = make_rng_stream(self.cfg.seed, &format!("{}/bootstrap", self.cfg.experiment_id()), stream as u64);
        tv_empirical(a, b, &opts, &mut rng)
    }

    fn auto_width(&self, first_coordinate: &[f64]) -> f64 {
        self.cfg.bin_width.unwrap_or_else(|| self.h().max(2.0 * interquartile_range(first_coordinate)))
    }

    fn decomposition(&mut self) -> Result<()> {
        let spec = self.cfg.build_spec()?;
        let sampler = SubordinatorSampler::new(spec, self.cfg.strategy)?;
        let jumps = self.cfg.jumps.unwrap_or_default();
        let (x, y, d, n) = (self.cfg.x.clone(), self.cfg.y.clone(), self.cfg.x.len(), self.cfg.n);
        for (ti, &t) in self.cfg.t_grid.clone().iter().enumerate() {
            let draws = try_replicate_map(n, self.cfg.seed, self.stream_id() ^ ti as u64, |rng, _| {
                let s = sampler.sample_increment(t, rng)?;
                let sd = (2.0 * s).sqrt();
                let z: Vec<f64> = (0..d).map(|_| sd * normal(rng)).collect();
                let yj = compound_poisson(jumps, t, d, rng)?;
                Ok::<_, LabError>((z, yj))
            })?;
            let shift = |base: &[f64], z: &[f64], y: Option<&[f64]>| -> Vec<f64> {
                (0..d).map(|k| base[k] + z[k] + y.map_or(0.0, |y| y[k])).collect()
            };
            let xa: Vec<Vec<f64>> = draws.iter().map(|(z, j)| shift(&x, z, Some(j))).collect();
            let xb: Vec<Vec<f64>> = draws.iter().map(|(z, j)| shift(&y, z, Some(j))).collect();
            let ba: Vec<Vec<f64>> = draws.iter().map(|(z, _)| shift(&x, z, None)).collect();
            let bb: Vec<Vec<f64>> = draws.iter().map(|(z, _)| shift(&y, z, None)).collect();
            let first: Vec<f64> = ba.iter().map(|v| v[0]).collect();
            let width = self.auto_width(&first);
            let tx = self.empirical(&xa, &xb, width, 2 * ti)?;
            let tb = self.empirical(&ba, &bb, width, 2 * ti + 1)?;
            let combined = (tx.stderr.powi(2) + tb.stderr.powi(2)).sqrt();
            self.out.rows.push(
                Row::new(t, tx.value, tx.stderr, n as u64)
                    .with("tv_subordinate_bm", tb.value)
                    .with("tv_subordinate_bm_stderr", tb.stderr)
                    .with("combined_stderr", combined)
                    .with("bin_width", width),
            );
        }
        let ok = self.out.rows.iter().all(|r| {
            r.value <= r.get("tv_subordinate_bm").unwrap() + 3.0 * r.get("combined_stderr").unwrap()
        });
        self.criterion("domination", ok, "TV(Y + B^f) ≤ TV(B^f) + 3 combined σ".into());
        Ok(())
    }

    fn truncated_slope(&mut self) -> Result<()> {
        let tr = self.cfg.truncated.expect("validated");
        let density = SymmetricLevyDensity::truncated_stable(tr.c, tr.alpha, tr.r);
        let mut slopes = Vec::new();
        for (pass, eps) in [tr.epsilon, tr.epsilon / 2.0].into_iter().enumerate() {
            let sampler = CpLevySampler::new(&density, eps)?;
            let grid = self.cfg.t_grid.clone();
            let paths = try_replicate_map(self.cfg.n, self.cfg.seed, self.stream_id() ^ pass as u64, |rng, _| {
                let mut x = 0.0;
                let mut prev = 0.0;
                let mut out = Vec::with_capacity(grid.len());
                for &t in &grid {
                    x += sampler.sample(t - prev, rng)?;
                    prev = t;
                    out.push(x);
                }
                Ok::<_, LabError>(out)
            })?;
            let mut values = Vec::new();
            for (ti, &t) in grid.iter().enumerate() {
                let z: Vec<f64> = paths.iter().map(|p| p[ti]).collect();
                let width = self.auto_width(&z);
                let a: Vec<Vec<f64>> = z.iter().map(|v| vec![self.cfg.x[0] + v]).collect();
                let b: Vec<Vec<f64>> = z.iter().map(|v| vec![self.cfg.y[0] + v]).collect();
                let est = self.empirical(&a, &b, width, pass * grid.len() + ti)?;
                values.push(est);
                if pass == 0 {
                    self.out.rows.push(Row::new(t, est.value, est.stderr, self.cfg.n as u64).with("bin_width", width));
                }
            }
            for (row, est) in self.out.rows.iter_mut().zip(&values).filter(|_| pass == 1) {
                row.extra.insert("value_half_epsilon".into(), est.value);
                row.extra.insert("stderr_half_epsilon".into(), est.stderr);
            }
            slopes.push(if pass == 0 { self.fit("value")? } else { self.fit("value_half_epsilon")? });
        }
        // report the slope at the configured ε
        if let Some(f) = slopes[0] {
            self.out.slope = Some(f);
            self.out.slope_of = Some("value".into());
        }
        self.slope_criterion("slope", slopes[0], -0.5, 0.15);
        if let (Some(a), Some(b)) = (slopes[0], slopes[1]) {
            let shift = (a.slope - b.slope).abs();
            self.criterion("epsilon_sensitivity", shift <= 0.05, format!("slope shift {shift:.4} at ε/2"));
        }
        Ok(())
    }

    fn laplace(&mut self) -> Result<()> {
        let spec = self.cfg.build_spec()?;
        let sampler = SubordinatorSampler::new(spec, self.cfg.strategy)?;
        let lambdas = self.cfg.lambdas.clone().unwrap_or_else(|| vec![0.5, 1.0, 4.0]);
        let grid = self.cfg.t_grid.clone();
        let n = self.cfg.n;
        let combos: Vec<(f64, f64)> = grid.iter().flat_map(|&t| lambdas.iter().map(move |&l| (l, t))).collect();
        let checks = try_replicate_map(combos.len(), self.cfg.seed, self.stream_id(), |rng, i| {
            let (l, t) = combos[i];
            sampler.validate_laplace(l, t, n, rng)
        })?;
        let mut all = true;
        for (ti, &t) in grid.iter().enumerate() {
            let block = &checks[ti * lambdas.len()..(ti + 1) * lambdas.len()];
            let worst = block
                .iter()
                .map(|c| {
                    let se = c.stderr.max(c.null_stderr);
                    if se > 0.0 { (c.mc_mean - c.target).abs() / se } else { 0.0 }
                })
                .fold(0.0, f64::max);
            let mut row = Row::new(t, worst, 0.0, n as u64);
            for c in block {
                row = row.with(&format!("mc_{}", c.lambda), c.mc_mean).with(&format!("target_{}", c.lambda), c.target);
                all &= c.pass;
            }
            self.out.rows.push(row);
        }
        self.criterion("laplace_3sigma", all, format!("{:?}: |mean − e^(−t f(λ))| ≤ 3σ", sampler.strategy()));
        Ok(())
    }
}

/// `Y_t` for jumps `±size` along a uniform coordinate at rate `rate`.
fn compound_poisson<R: Rng + ?Sized>(cfg: JumpConfig, t: f64, d: usize, rng: &mut R) -> Result<Vec<f64>> {
    let mut y = vec![0.0; d];
    if cfg.rate == 0.0 {
        return Ok(y);
    }
    use rand_distr::{Distribution, Poisson};
    let k = Poisson::new(cfg.rate * t).map_err(|e| LabError::Argument(e.to_string()))?.sample(rng) as u64;
    for _ in 0..k {
        let coord = if d == 1 { 0 } else { rng.random_range(0..d) };
        y[coord] += if rng.random::<bool>() { cfg.size } else { -cfg.size };
    }
    Ok(y)
}

/// The specs a config refers to, for display.
pub fn describe_specs(cfg: &ExperimentConfig) -> Vec<String> {
    cfg.build_specs().map(|v| v.iter().map(BernsteinSpec::label).collect()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind, family: Family, grid: Vec<f64>, n: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, Some(family), grid);
        c.n = n;
        c.seed = 42;
        c
    }

    #[test]
    fn csv_formatting_round_trips() {
        let rows = vec![Row::new(0.1, 1.0 / 3.0, 1e-7, 5), Row::new(2.0, 0.0, 0.0, 0)];
        let s = rows_csv(&rows);
        assert_eq!(s.lines().next(), Some("t,value,stderr,n"));
        assert_eq!(s.lines().nth(1), Some("0.1,0.3333333333333333,1e-7,5"));
        let parsed: f64 = s.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, 1.0 / 3.0);
        assert_eq!(density_csv(&[(-0.5, 0.25)]), "z,p\n-0.5,0.25\n");
    }

    #[test]
    fn bound_curve_scaling() {
        let grid = vec![1.0, 3.0, 10.0, 30.0, 100.0, 300.0];
        let r = run_experiment(&cfg(ExperimentKind::BoundCurve, Family::StablePow { alpha: 1.0 }, grid, 1)).unwrap();
        assert_eq!(r.status, Status::Ok);
        let s = r.slope.unwrap();
        assert!((s.slope + 1.0).abs() < 0.01, "{s:?}");
        assert!(r.pass);
    }

    #[test]
    fn survival_is_deterministic_across_threads() {
        let c = cfg(ExperimentKind::CouplingSurvival, Family::StablePow { alpha: 1.0 }, vec![5.0, 10.0, 20.0], 20_000);
        let a = run_experiment_with_threads(&c, 1).unwrap();
        let b = run_experiment_with_threads(&c, 3).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert!(a.criterion("bound_dominates").unwrap().pass);
    }

    #[test]
    fn failures_are_captured() {
        // a strategy that does not fit the family fails inside the run
        let mut c = cfg(ExperimentKind::CouplingSurvival, Family::StablePow { alpha: 1.0 }, vec![1.0], 10);
        c.strategy = crate::subordinators::StrategyName::ExactGamma;
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.status, Status::Failed);
        assert!(!r.pass && r.error.is_some());
    }

    #[test]
    fn outputs_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentKind::BoundCurve, Family::StablePow { alpha: 1.0 }, vec![1.0, 2.0], 1);
        c.output.csv = Some(dir.path().join("out/rows.csv"));
        c.output.report = Some(dir.path().join("out/report.json"));
        let r = run_experiment(&c).unwrap();
        r.write_outputs().unwrap();
        let csv = std::fs::read_to_string(dir.path().join("out/rows.csv")).unwrap();
        assert_eq!(csv, r.csv());
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
        assert_eq!(json["prefactor_mode"], "corrected");
        assert_eq!(json["config"]["kind"], "bound-curve");
    }
}
