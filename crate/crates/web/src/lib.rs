//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes a family as a JSON string such as
//! `{"family":"stable_pow","alpha":1}` and returns a JSON string. The
//! `*_json` functions carry the logic and are usable natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use coupling_lab::bounds::{bound_integral_report, lower_bound_integral, tv_bound_subordinate, BoundRequest, PrefactorMode};
use coupling_lab::coupling::{survival_indicators, survival_tb_distance};
use coupling_lab::densities::{density_1d, tv_exact_from_grid, tv_halfspace_lower, GridParams};
use coupling_lab::harness::make_rng_stream;
use coupling_lab::stats::proportion;
use coupling_lab::subordinators::SubordinatorSampler;
use coupling_lab::{BernsteinSpec, Family};

/// Largest replicate count accepted from the page.
pub const MAX_REPLICATES: usize = 200_000;

fn spec_from(text: &str) -> Result<BernsteinSpec, String> {
    let family: Family = serde_json::from_str(text).map_err(|e| format!("bad family: {e}"))?;
    BernsteinSpec::new(family).map_err(|e| e.to_string())
}

fn mode_from(text: &str) -> Result<PrefactorMode, String> {
    match text {
        "corrected" => Ok(PrefactorMode::Corrected),
        "as_printed" => Ok(PrefactorMode::AsPrinted),
        other => Err(format!("unknown prefactor mode `{other}`")),
    }
}

/// The subordinate bound at `(t, h)` with its integral and, when `f'(0+)`
/// is finite, the Jensen lower bound on the integral.
pub fn bound_json(spec: &str, t: f64, h: f64, mode: &str) -> Result<String, String> {
    let spec = spec_from(spec)?;
    let mode = mode_from(mode)?;
    let req = BoundRequest::new(spec.clone(), t, h).mode(mode);
    let value = tv_bound_subordinate(&req).map_err(|e| e.to_string())?;
    let integral = bound_integral_report(&spec, t, 1.0).map_err(|e| e.to_string())?;
    Ok(json!({
        "spec": spec.label(),
        "t": t,
        "h": h,
        "prefactor_mode": mode,
        "value": value,
        "integral": integral.value,
        "integral_error": integral.abs_error,
        "divergence_warning": integral.divergence_warning,
        "lower_integral": lower_bound_integral(&spec, t),
    })
    .to_string())
}

/// Exact TV, its half-space lower bound, the upper bound, and the density
/// on `[-window, window]` thinned to about `points` samples.
pub fn exact_tv_json(spec: &str, t: f64, h: f64, window: f64, points: usize) -> Result<String, String> {
    let spec = spec_from(spec)?;
    let grid = density_1d(&spec, t, GridParams::default()).map_err(|e| e.to_string())?;
    let exact = tv_exact_from_grid(&grid, h).map_err(|e| e.to_string())?;
    let lower = tv_halfspace_lower(&spec, t, &[0.0], &[h]).map_err(|e| e.to_string())?;
    let upper = tv_bound_subordinate(&BoundRequest::new(spec.clone(), t, h)).ok();
    let window = window.clamp(grid.h, grid.half_width);
    let m = (window / grid.h).ceil() as usize;
    let stride = (2 * m / points.max(2)).max(1);
    let density: Vec<Value> = (0..=2 * m)
        .step_by(stride)
        .map(|i| {
            let z = (i as f64 - m as f64) * grid.h;
            json!([z, grid.value_at(z)])
        })
        .collect();
    Ok(json!({
        "spec": spec.label(),
        "t": t,
        "h": h,
        "tv": exact.value,
        "tv_direct": exact.direct,
        "halfspace_lower": lower,
        "upper_bound": upper,
        "density": density,
    })
    .to_string())
}

/// Monte-Carlo `2 P(T > t)` for the reflection-subordinate coupling at
/// distance `h`, next to the Corrected bound and the Brownian survival.
pub fn coupling_survival_json(spec: &str, h: f64, t_grid: &[f64], n: usize, seed: u64) -> Result<String, String> {
    let spec = spec_from(spec)?;
    if n == 0 || n > MAX_REPLICATES {
        return Err(format!("n must lie in 1..={MAX_REPLICATES}"));
    }
    let sampler = SubordinatorSampler::exact(spec.clone()).map_err(|e| e.to_string())?;
    let mut alive = vec![0usize; t_grid.len()];
    for i in 0..n {
        let mut rng = make_rng_stream(seed, "web-survival", i as u64);
        let ind = survival_indicators(&sampler, h, t_grid, &mut rng).map_err(|e| e.to_string())?;
        for (a, s) in alive.iter_mut().zip(ind) {
            *a += s as usize;
        }
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    for (&t, &a) in t_grid.iter().zip(&alive) {
        let p = proportion(a, n);
        let bound = tv_bound_subordinate(&BoundRequest::new(spec.clone(), t, h)).ok();
        let tb = survival_tb_distance(h, t).map_err(|e| e.to_string())?;
        rows.push(json!({
            "t": t,
            "value": 2.0 * p.mean,
            "stderr": 2.0 * p.stderr,
            "bound": bound,
            "brownian": 2.0 * tb.exact,
        }));
    }
    Ok(json!({ "spec": spec.label(), "h": h, "n": n, "rows": rows }).to_string())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bound(spec: &str, t: f64, h: f64, mode: &str) -> Result<String, JsError> {
    js(bound_json(spec, t, h, mode))
}

#[wasm_bindgen(js_name = exactTv)]
pub fn exact_tv(spec: &str, t: f64, h: f64, window: f64, points: usize) -> Result<String, JsError> {
    js(exact_tv_json(spec, t, h, window, points))
}

#[wasm_bindgen(js_name = couplingSurvival)]
pub fn coupling_survival(spec: &str, h: f64, t_grid: Vec<f64>, n: usize, seed: u32) -> Result<String, JsError> {
    js(coupling_survival_json(spec, h, &t_grid, n, seed.into()))
}
