//! Adaptive Gauss–Kronrod quadrature.
//!
//! `integrate` is a globally adaptive G7/K15 scheme on a finite interval (the
//! interval with the largest error estimate is bisected until the requested
//! tolerance is met). `integrate_to_infinity` covers `[a, ∞)` by summing
//! panels `[a + U, a + 2U]` of doubling width until the panel contribution is
//! negligible twice in a row.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{LabError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

/// One G7/K15 application on `[a, b]`: returns (kronrod, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        res_k += WGK[j] * s;
        if j % 2 == 1 {
            res_g += WG[j / 2] * s;
        }
    }
    let k = res_k * half;
    let g = res_g * half;
    (k, (k - g).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(LabError::Argument("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let (value, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    let mut evals = 15;
    let mut splits = 0;
    loop {
        if !total.is_finite() {
            return Err(LabError::NonConvergence("integrand produced a non-finite value".into()));
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if splits >= opts.max_subdivisions {
            // Accept when the remaining error is at rounding level.
            if total_err <= 1e-13 * total.abs().max(f64::MIN_POSITIVE) * evals as f64 {
                break;
            }
            return Err(LabError::NonConvergence(format!(
                "adaptive quadrature on [{a}, {b}] stalled at error {total_err:e} (value {total:e})"
            )));
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at double precision.
            heap.push(Panel { err: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.err).sum();
            if heap.iter().all(|p| p.err == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evals += 30;
        splits += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        if splits % 64 == 0 {
            // Refresh the running sums against accumulated cancellation.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error: f64 = heap.iter().map(|p| p.err).sum();
    Ok(Quadrature { value, abs_error, evaluations: evals })
}

/// Options for [`integrate_to_infinity`].
#[derive(Debug, Clone, Copy)]
pub struct TailOptions {
    /// Width of the first panel `[a, a + first_width]`.
    pub first_width: f64,
    /// A panel is negligible when its contribution is below `rel_increment`
    /// times the accumulated value.
    pub rel_increment: f64,
    pub max_doublings: usize,
    pub panel: QuadOptions,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions {
            first_width: 1.0,
            rel_increment: 1e-10,
            max_doublings: 60,
            panel: QuadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailQuadrature {
    pub value: f64,
    pub abs_error: f64,
    /// Upper end of the last panel integrated.
    pub upper: f64,
    pub doublings: usize,
}

/// Integrates `f` over `[a, ∞)` by panels of doubling width.
///
/// Stops once two consecutive panels each contribute at most
/// `rel_increment · |accumulated|`. Fails with `Divergence` when
/// `max_doublings` panels do not reach that state.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: TailOptions) -> Result<TailQuadrature> {
    let mut lo = a;
    let mut width = opts.first_width;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut quiet = 0;
    for doublings in 0..=opts.max_doublings {
        let hi = lo + width;
        let q = integrate(&f, lo, hi, opts.panel)?;
        total += q.value;
        err += q.abs_error;
        if q.value.abs() <= opts.rel_increment * total.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(TailQuadrature { value: total, abs_error: err + q.value.abs(), upper: hi, doublings });
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(LabError::Divergence(format!(
        "tail panels still contribute after {} doublings (accumulated {total:e})",
        opts.max_doublings
    )))
}
