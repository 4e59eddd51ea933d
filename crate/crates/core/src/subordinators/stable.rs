use std::f64::consts::PI;

use rand::Rng;

/// Uniform draw on the open interval (0, 1).
#[inline]
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

#[inline]
pub(crate) fn std_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -open01(rng).ln()
}

/// One-sided stable variate with `E[e^{-λS}] = e^{-λ^a}`, `a ∈ (0, 1)`.
///
/// Kanter's representation (the one-sided case of Chambers–Mallows–Stuck):
/// `S = sin(aπU) / sin(πU)^{1/a} · (sin((1-a)πU) / E)^{(1-a)/a}` with `U`
/// uniform on (0,1) and `E` standard exponential.
#[inline]
pub fn positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let u = open01(rng);
    let e = std_exp(rng);
    let ln_s = (a * PI * u).sin().ln() - (PI * u).sin().ln() / a
        + (1.0 - a) / a * (((1.0 - a) * PI * u).sin().ln() - e.ln());
    ln_s.exp().min(f64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::rng::make_rng_stream;
    use crate::stats::mean_stderr;

    #[test]
    fn laplace_transform_of_stable_half() {
        let mut rng = make_rng_stream(11, "stable", 0);
        let v: Vec<f64> = (0..100_000).map(|_| (-positive_stable(0.5, &mut rng)).exp()).collect();
        let m = mean_stderr(&v);
        let target = (-1.0f64).exp();
        assert!((m.mean - target).abs() < 3.0 * m.stderr, "{} vs {target}", m.mean);
    }

    #[test]
    fn stable_half_is_levy_law() {
        // a = 1/2: S has the law of 1/(4 G) with G ~ Gamma(1/2, 1), i.e. 1/(2 Z^2)
        use crate::stats::ks_test_one_sample;
        use crate::special::erfc;
        let mut rng = make_rng_stream(12, "stable", 0);
        let v: Vec<f64> = (0..50_000).map(|_| positive_stable(0.5, &mut rng)).collect();
        // P(1/(2Z^2) <= x) = P(|Z| >= 1/sqrt(2x)) = erfc(1/(2 sqrt(x)))
        let ks = ks_test_one_sample(&v, |x| if x <= 0.0 { 0.0 } else { erfc(0.5 / x.sqrt()) }, 0.01);
        assert!(ks.pass, "{ks:?}");
    }
}
