//! Least-squares slopes on log-log axes.

use serde::Serialize;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval for the slope.
    pub half_width: f64,
    pub points: usize,
}

impl SlopeFit {
    /// Whether `target` is within `tol` of the fitted slope.
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

/// Two-sided 97.5% Student-t quantiles for 1..=30 degrees of freedom.
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
    2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
];

fn t_quantile(df: usize) -> f64 {
    match df {
        0 => f64::INFINITY,
        1..=30 => T975[df - 1],
        _ => 1.959_964 + 2.4 / df as f64,
    }
}

/// Ordinary least squares of `log v` on `log t`.
pub fn fit_loglog_slope(t: &[f64], v: &[f64]) -> Result<SlopeFit> {
    if t.len() != v.len() {
        return Err(LabError::Argument(format!("{} times for {} values", t.len(), v.len())));
    }
    if t.len() < 4 {
        return Err(LabError::Argument(format!("slope fit needs at least 4 points, got {}", t.len())));
    }
    if let Some(bad) = t.iter().chain(v).find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(LabError::Argument(format!("log-log fit needs positive finite data, got {bad}")));
    }
    let xs: Vec<f64> = t.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(LabError::Argument("slope fit needs at least two distinct times".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let df = xs.len() - 2;
    let se = (rss / df as f64 / sxx).sqrt();
    Ok(SlopeFit { slope, intercept, half_width: t_quantile(df) * se, points: xs.len() })
}
