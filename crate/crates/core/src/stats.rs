//! Small statistical toolkit: moment summaries and Kolmogorov–Smirnov tests.

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Mean and standard error of the mean, accumulated in input order.
pub fn mean_stderr(values: &[f64]) -> MeanEstimate {
    let n = values.len();
    if n == 0 {
        return MeanEstimate { mean: f64::NAN, stderr: f64::NAN, n };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MeanEstimate { mean, stderr: (var / n as f64).sqrt(), n }
}

/// Proportion estimate from a count, with the binomial standard error.
pub fn proportion(successes: usize, n: usize) -> MeanEstimate {
    let p = successes as f64 / n as f64;
    MeanEstimate { mean: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), n }
}

/// Asymptotic Kolmogorov critical coefficient `c(a)` with
/// `P(sqrt(n) D_n > c(a)) = a`, via `c(a) = sqrt(-ln(a/2) / 2)`.
pub fn ks_coefficient(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

/// One-sample critical value at significance `level`.
pub fn ks_critical_one_sample(n: usize, level: f64) -> f64 {
    ks_coefficient(level) / (n as f64).sqrt()
}

/// Two-sample critical value at significance `level`.
pub fn ks_critical_two_sample(n: usize, m: usize, level: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(level) * ((n + m) / (n * m)).sqrt()
}

/// One-sample KS statistic of `sample` against the continuous cdf `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Outcome of a KS test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
}

pub fn ks_test_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F, level: f64) -> KsOutcome {
    let statistic = ks_statistic(sample, cdf);
    let critical = ks_critical_one_sample(sample.len(), level);
    KsOutcome { statistic, critical, pass: statistic < critical }
}

pub fn ks_test_two_sample(a: &[f64], b: &[f64], level: f64) -> KsOutcome {
    let statistic = ks_two_sample(a, b);
    let critical = ks_critical_two_sample(a.len(), b.len(), level);
    KsOutcome { statistic, critical, pass: statistic < critical }
}
