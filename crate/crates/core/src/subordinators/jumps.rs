//! Jump-size laws for compound-Poisson approximations.
//!
//! A [`JumpTable`] holds the restriction of a Lévy density to `[lo, hi]`
//! (with `hi` possibly infinite), normalized to a probability law, together
//! with its total mass (the jump rate).

use rand::Rng;

use crate::bernstein::RealFn;
use crate::error::{LabError, Result};
use crate::quad::{integrate, QuadOptions};

/// Panel ratio of the tabulation grid.
const PANELS_PER_OCTAVE: usize = 16;
/// Tabulation stops after this many octaves; beyond it the tail is
/// continued as a power law fitted on the last panel.
const MAX_OCTAVES: usize = 64;

#[derive(Debug, Clone)]
enum Shape {
    /// Density `c s^{-1-p}` on `[lo, hi]`: inverse cdf in closed form.
    PowerLaw { p: f64, lo_pow: f64, hi_pow: f64, int_inv: Option<i32> },
    /// Piecewise local power laws on a log grid, optionally with a
    /// power-law tail beyond the last node.
    Tabulated {
        nodes: Vec<f64>,
        /// Local exponents `q_i` per panel (density ∝ s^{-1-q_i}).
        exponents: Vec<f64>,
        /// Cumulative probability at the right end of each panel.
        cumulative: Vec<f64>,
        tail_exponent: Option<f64>,
        /// Probability beyond the last node.
        tail_prob: f64,
    },
}

#[derive(Debug, Clone)]
pub struct JumpTable {
    rate: f64,
    shape: Shape,
}

fn panel_mass(density: &RealFn, a: f64, b: f64) -> Result<f64> {
    // integrate in log s for panels spanning a ratio > 1
    let f = |v: f64| {
        let s = v.exp();
        density(s) * s
    };
    Ok(integrate(f, a.ln(), b.ln(), QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() })?.value)
}

impl JumpTable {
    /// Exact power-law jumps with density `c s^{-1-p}` on `[lo, hi]`.
    pub fn power_law(c: f64, p: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(c > 0.0 && lo > 0.0 && hi > lo) {
            return Err(LabError::Argument("power-law jumps need c > 0 and 0 < lo < hi".into()));
        }
        if p <= 0.0 && hi.is_infinite() {
            return Err(LabError::Argument("power-law tail is not integrable".into()));
        }
        if p == 0.0 {
            return Err(LabError::Argument("power-law exponent must be nonzero".into()));
        }
        let lo_pow = lo.powf(-p);
        let hi_pow = if hi.is_infinite() { 0.0 } else { hi.powf(-p) };
        let rate = c * (lo_pow - hi_pow) / p;
        let inv = -1.0 / p;
        let int_inv = if inv.fract() == 0.0 && inv.abs() < 16.0 { Some(inv as i32) } else { None };
        Ok(JumpTable { rate, shape: Shape::PowerLaw { p, lo_pow, hi_pow, int_inv } })
    }

    /// Tabulates an arbitrary density on `[lo, hi]`.
    pub fn tabulate(density: &RealFn, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(LabError::Argument("jump range must satisfy 0 < lo < hi".into()));
        }
        let ratio = 2f64.powf(1.0 / PANELS_PER_OCTAVE as f64);
        let mut nodes = vec![lo];
        let mut masses = Vec::new();
        let mut total = 0.0;
        let mut tail_exponent = None;
        let mut tail_mass = 0.0;
        loop {
            let a = *nodes.last().expect("nonempty");
            let b = (a * ratio).min(hi);
            let m = panel_mass(density, a, b)?;
            if !m.is_finite() || m < 0.0 {
                return Err(LabError::Argument(format!("density not integrable on [{a}, {b}]")));
            }
            nodes.push(b);
            masses.push(m);
            total += m;
            if b >= hi {
                break;
            }
            let panels = masses.len();
            let negligible = m <= 1e-17 * total && density(b) * b <= 1e-17 * total;
            if negligible && panels >= PANELS_PER_OCTAVE {
                break;
            }
            if panels >= PANELS_PER_OCTAVE * MAX_OCTAVES {
                // continue as a power law fitted on the last panel
                let (d0, d1) = (density(a), density(b));
                let q = -(d1 / d0).ln() / ratio.ln() - 1.0;
                if !(q > 1e-6) || !q.is_finite() {
                    return Err(LabError::Argument(
                        "Lévy density tail beyond the cutoff is not integrable".into(),
                    ));
                }
                tail_mass = d1 * b / q;
                total += tail_mass;
                tail_exponent = Some(q);
                break;
            }
        }
        if !(total > 0.0) || !total.is_finite() {
            return Err(LabError::Argument("jump measure has zero or infinite mass".into()));
        }
        let mut exponents = Vec::with_capacity(masses.len());
        let mut cumulative = Vec::with_capacity(masses.len());
        let mut acc = 0.0;
        for (i, m) in masses.iter().enumerate() {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let (da, db) = (density(a), density(b));
            let q = if da > 0.0 && db > 0.0 { -(db / da).ln() / (b / a).ln() - 1.0 } else { 0.0 };
            exponents.push(if q.is_finite() { q } else { 0.0 });
            acc += m;
            cumulative.push(acc / total);
        }
        Ok(JumpTable { rate: total, shape: Shape::Tabulated { nodes, exponents, cumulative, tail_exponent, tail_prob: tail_mass / total } })
    }

    /// Total mass of the restricted measure (jumps per unit time).
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// One jump size from the normalized law.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v: f64 = rng.random();
        self.quantile(v)
    }

    /// Inverse cdf of the normalized law.
    pub fn quantile(&self, v: f64) -> f64 {
        match &self.shape {
            Shape::PowerLaw { p, lo_pow, hi_pow, int_inv } => {
                let base = hi_pow + (1.0 - v) * (lo_pow - hi_pow);
                match int_inv {
                    Some(k) => base.powi(*k),
                    None => base.powf(-1.0 / p),
                }
            }
            Shape::Tabulated { nodes, exponents, cumulative, tail_exponent, tail_prob } => {
                if let Some(q) = tail_exponent {
                    if 1.0 - v < *tail_prob {
                        // power-law tail beyond the last node
                        let last = *nodes.last().expect("nonempty");
                        let rest = ((1.0 - v) / tail_prob).max(f64::MIN_POSITIVE);
                        return last * rest.powf(-1.0 / q);
                    }
                }
                let i = cumulative.partition_point(|&c| c < v).min(exponents.len() - 1);
                let c0 = if i == 0 { 0.0 } else { cumulative[i - 1] };
                let w = ((v - c0) / (cumulative[i] - c0)).clamp(0.0, 1.0);
                let (a, b) = (nodes[i], nodes[i + 1]);
                let q = exponents[i];
                if q.abs() < 1e-9 {
                    a * (b / a).powf(w)
                } else {
                    let (pa, pb) = (a.powf(-q), b.powf(-q));
                    (pb + (1.0 - w) * (pa - pb)).powf(-1.0 / q)
                }
            }
        }
    }
}
