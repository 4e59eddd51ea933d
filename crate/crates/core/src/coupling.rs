//! Reflection coupling of Brownian motions and its subordinate version.
//!
//! Brownian motion here has `E e^{iξB_t} = e^{-t|ξ|²}`, i.e. variance `2t`
//! per coordinate. Reflection-coupled paths started at `x` and `y` meet when
//! the component along `y − x` first reaches the bisecting hyperplane, at
//! distance `|x − y|/2`; that hitting time is `T^B = |x−y|²/(8Z²)`.
//! Time-changing both paths by one subordinator `S`, the subordinate pair
//! meets at `T^X = inf{t : S_t ≥ T^B}`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::special::erf;
use crate::subordinators::{FirstPassageResult, PassageOptions, SubordinatorSampler};

/// One draw of the coupling times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingDraw {
    /// Brownian coupling time.
    pub tb: f64,
    /// First passage of the subordinator over `tb`.
    pub tx: FirstPassageResult,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Per-coordinate subordinate coupling times of a product coupling.
    pub per_coordinate: Option<Vec<f64>>,
}

impl CouplingDraw {
    /// The subordinate coupling time.
    pub fn time(&self) -> f64 {
        self.tx.time
    }
}

/// Exact survival of `T^B` with the `|x−y|/(2√(πt))` envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalTb {
    pub exact: f64,
    pub envelope: f64,
}

/// Coupled positions at a fixed time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledMarginals {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Subordinator value `S_t`.
    pub s: f64,
    /// Whether the pair has met by time `t`.
    pub coupled: bool,
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() || x.is_empty() {
        return Err(LabError::Argument(format!(
            "points must share a positive dimension, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Mirror image of `z` across the hyperplane bisecting `x` and `y`.
pub fn reflect(x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    check_dims(x, y)?;
    check_dims(x, z)?;
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 == 0.0 {
        return Err(LabError::DegenerateReflection);
    }
    let dot: f64 = z.iter().zip(x.iter().zip(y)).map(|(zi, (xi, yi))| (zi - (xi + yi) / 2.0) * (xi - yi)).sum();
    let k = 2.0 * dot / d2;
    Ok(z.iter().zip(x.iter().zip(y)).map(|(zi, (xi, yi))| zi - k * (xi - yi)).collect())
}

#[inline]
pub(crate) fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn nonzero_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let z = normal(rng);
        if z != 0.0 {
            return z;
        }
    }
}

/// Brownian coupling time of a pair at distance `h`.
pub fn sample_tb_distance<R: Rng + ?Sized>(h: f64, rng: &mut R) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    let z = nonzero_normal(rng);
    h * h / (8.0 * z * z)
}

/// Brownian coupling time `T^B` for starting points `x`, `y` (0 when equal).
pub fn sample_tb<R: Rng + ?Sized>(x: &[f64], y: &[f64], rng: &mut R) -> Result<f64> {
    check_dims(x, y)?;
    Ok(sample_tb_distance(distance(x, y), rng))
}

/// `P(T^B > t)` at distance `h`: `erf(h / (4√t))`, the mass of `N(0, 2t)`
/// in `(−h/2, h/2)`.
pub fn survival_tb_distance(h: f64, t: f64) -> Result<SurvivalTb> {
    if !(t > 0.0) {
        return Err(LabError::Argument(format!("t must be positive, got {t}")));
    }
    Ok(SurvivalTb { exact: erf(h / (4.0 * t.sqrt())), envelope: h / (2.0 * (std::f64::consts::PI * t).sqrt()) })
}

pub fn survival_tb(x: &[f64], y: &[f64], t: f64) -> Result<SurvivalTb> {
    check_dims(x, y)?;
    survival_tb_distance(distance(x, y), t)
}

fn zero_passage() -> FirstPassageResult {
    FirstPassageResult { time: 0.0, pre_level: 0.0, post_level: 0.0, step: 0.0, censored: false }
}

/// Draws `T^B`, then `T^X` as the first passage of an independent
/// subordinator path over it.
pub fn sample_tx<R: Rng + ?Sized>(
    sampler: &SubordinatorSampler,
    x: &[f64],
    y: &[f64],
    tol: f64,
    rng: &mut R,
) -> Result<CouplingDraw> {
    sample_tx_with(sampler, x, y, PassageOptions::new(tol), rng)
}

pub fn sample_tx_with<R: Rng + ?Sized>(
    sampler: &SubordinatorSampler,
    x: &[f64],
    y: &[f64],
    opts: PassageOptions,
    rng: &mut R,
) -> Result<CouplingDraw> {
    let tb = sample_tb(x, y, rng)?;
    let tx = if tb == 0.0 { zero_passage() } else { sampler.first_passage_with(tb, opts, rng)? };
    Ok(CouplingDraw { tb, tx, x: x.to_vec(), y: y.to_vec(), per_coordinate: None })
}

/// Independent one-dimensional couplings per coordinate; the pair meets
/// when the last coordinate does.
pub fn sample_tx_product<R: Rng + ?Sized>(
    samplers: &[SubordinatorSampler],
    x: &[f64],
    y: &[f64],
    tol: f64,
    rng: &mut R,
) -> Result<CouplingDraw> {
    check_dims(x, y)?;
    if samplers.len() != x.len() {
        return Err(LabError::Argument(format!("{} samplers for dimension {}", samplers.len(), x.len())));
    }
    let mut times = Vec::with_capacity(x.len());
    let mut worst: Option<(f64, FirstPassageResult)> = None;
    for (i, s) in samplers.iter().enumerate() {
        let d = sample_tx(s, &x[i..=i], &y[i..=i], tol, rng)?;
        times.push(d.tx.time);
        if worst.as_ref().map_or(true, |w| d.tx.time > w.1.time) {
            worst = Some((d.tb, d.tx));
        }
    }
    let (tb, tx) = worst.expect("nonempty");
    Ok(CouplingDraw { tb, tx, x: x.to_vec(), y: y.to_vec(), per_coordinate: Some(times) })
}

/// Coupled positions `(X_t^x, X̂_t^y)` at time `t`.
///
/// Draws `S_t`, then the Brownian displacement `W ~ N(0, 2 S_t I)` of the
/// first path. Whether the reflected pair has met by Brownian time `S_t`
/// depends on `W` through its component `w` along `y − x`: the meeting has
/// happened for sure if `w ≥ δ = |x−y|/2`, and otherwise with the bridge
/// crossing probability `exp(−δ(δ − w)/S_t)`. The second point is the
/// mirror image of the first before the meeting and equal to it after.
pub fn simulate_coupled_marginals<R: Rng + ?Sized>(
    sampler: &SubordinatorSampler,
    x: &[f64],
    y: &[f64],
    t: f64,
    rng: &mut R,
) -> Result<CoupledMarginals> {
    check_dims(x, y)?;
    let s = sampler.sample_increment(t, rng)?;
    let sd = (2.0 * s).sqrt();
    let w: Vec<f64> = (0..x.len()).map(|_| sd * normal(rng)).collect();
    let first: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a + b).collect();
    let h = distance(x, y);
    if h == 0.0 {
        return Ok(CoupledMarginals { second: first.clone(), first, s, coupled: true });
    }
    let delta = h / 2.0;
    let along: f64 = w.iter().zip(x.iter().zip(y)).map(|(wi, (xi, yi))| wi * (yi - xi)).sum::<f64>() / h;
    let coupled = if along >= delta {
        true
    } else if s > 0.0 {
        let p = (-delta * (delta - along) / s).exp();
        rng.random::<f64>() < p
    } else {
        false
    };
    let second = if coupled { first.clone() } else { reflect(x, y, &first)? };
    Ok(CoupledMarginals { first, second, s, coupled })
}

/// Survival indicators `1{T^X > t}` on a time grid for one coupled pair at
/// distance `h`, using `{T^X > t} = {S_t < T^B}` along one subordinator
/// path. Exact: no first-passage discretization is involved.
pub fn survival_indicators<R: Rng + ?Sized>(
    sampler: &SubordinatorSampler,
    h: f64,
    grid: &[f64],
    rng: &mut R,
) -> Result<Vec<bool>> {
    let tb = sample_tb_distance(h, rng);
    let path = sampler.sample_path(grid, rng)?;
    Ok(path.iter().map(|&s| s < tb).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::BernsteinSpec;
    use crate::harness::rng::make_rng_stream;
    use crate::quad::{integrate, QuadOptions};
    use crate::stats::{ks_test_one_sample, ks_test_two_sample, proportion};

    fn stable1() -> SubordinatorSampler {
        SubordinatorSampler::exact(BernsteinSpec::stable_pow(1.0).unwrap()).unwrap()
    }

    fn drift(b: f64) -> SubordinatorSampler {
        SubordinatorSampler::exact(BernsteinSpec::linear(b).unwrap()).unwrap()
    }

    #[test]
    fn reflection_basics() {
        let x = [0.3, -1.0, 2.0];
        let y = [1.5, 0.5, -0.25];
        let r = reflect(&x, &y, &x).unwrap();
        assert!(r.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-14));
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a + b) / 2.0).collect();
        let r = reflect(&x, &y, &mid).unwrap();
        assert!(r.iter().zip(&mid).all(|(a, b)| (a - b).abs() < 1e-15));
        assert_eq!(reflect(&x, &x, &y), Err(LabError::DegenerateReflection));
    }

    #[test]
    fn reflection_is_involution() {
        let mut rng = make_rng_stream(1, "refl", 0);
        let x = [0.1, 0.2, -0.4];
        let y = [-2.0, 0.7, 1.1];
        for _ in 0..100 {
            let z: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
            let back = reflect(&x, &y, &reflect(&x, &y, &z).unwrap()).unwrap();
            assert!(back.iter().zip(&z).all(|(a, b)| (a - b).abs() <= 1e-14));
        }
    }

    #[test]
    fn tb_equal_points() {
        let mut rng = make_rng_stream(0, "tb", 0);
        assert_eq!(sample_tb(&[1.0, 2.0], &[1.0, 2.0], &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn tb_survival_value() {
        let s = survival_tb(&[0.0], &[2.0], 1.0).unwrap();
        assert!((s.exact - 0.520_499_877_813_046_5).abs() < 1e-12);
        // quadrature oracle: √(2/π) ∫_0^{1/√2} e^{-u²/2} du
        let q = integrate(|u: f64| (-u * u / 2.0).exp(), 0.0, 0.5f64.sqrt(), QuadOptions::default()).unwrap();
        assert!((s.exact - (2.0 / std::f64::consts::PI).sqrt() * q.value).abs() < 1e-12);
        let mut rng = make_rng_stream(2, "tb", 0);
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_tb(&[0.0], &[2.0], &mut rng).unwrap() > 1.0).count();
        let p = proportion(hits, n);
        assert!((p.mean - s.exact).abs() <= 3.0 * p.stderr, "{p:?}");
    }

    #[test]
    fn tb_survival_limits_and_envelope() {
        assert!(survival_tb_distance(1.0, 1e12).unwrap().exact < 1e-6);
        assert!(survival_tb_distance(1.0, 1e-12).unwrap().exact > 1.0 - 1e-12);
        for i in 0..20 {
            let t = 0.01 * 2f64.powi(i);
            let s = survival_tb_distance(1.3, t).unwrap();
            assert!(s.exact <= s.envelope, "t={t}");
        }
    }

    #[test]
    fn tb_brownian_scaling() {
        let mut rng = make_rng_stream(3, "tb", 0);
        let n = 100_000;
        let a: Vec<f64> = (0..n).map(|_| 9.0 * sample_tb(&[0.0, 0.0], &[1.0, 1.0], &mut rng).unwrap()).collect();
        let b: Vec<f64> = (0..n).map(|_| sample_tb(&[0.0, 0.0], &[3.0, 3.0], &mut rng).unwrap()).collect();
        assert!(ks_test_two_sample(&a, &b, 0.01).pass);
        let c: Vec<f64> = (0..n).map(|_| sample_tb(&[0.0], &[2.0], &mut rng).unwrap()).collect();
        let ks = ks_test_one_sample(&c, |t| if t <= 0.0 { 0.0 } else { 1.0 - erf(0.5 / t.sqrt()) }, 0.01);
        assert!(ks.pass, "{ks:?}");
    }

    #[test]
    fn drift_coupling_times() {
        let mut rng = make_rng_stream(4, "tx", 0);
        for _ in 0..1000 {
            let d = sample_tx(&drift(1.0), &[0.0], &[1.0], 1e-3, &mut rng).unwrap();
            assert_eq!(d.tx.time, d.tb);
            let d = sample_tx(&drift(2.0), &[0.0], &[1.0], 1e-3, &mut rng).unwrap();
            assert_eq!(d.tx.time, d.tb / 2.0);
        }
    }

    #[test]
    fn passage_identity_on_every_draw() {
        let mut rng = make_rng_stream(5, "tx", 0);
        let s = stable1();
        for _ in 0..2000 {
            let d = sample_tx(&s, &[0.0], &[1.0], 1e-2, &mut rng).unwrap();
            assert!(d.tb.is_finite());
            assert!(d.tx.pre_level < d.tb && d.tb <= d.tx.post_level);
        }
    }

    #[test]
    fn equal_points_couple_immediately() {
        let mut rng = make_rng_stream(6, "tx", 0);
        let d = sample_tx(&stable1(), &[0.5], &[0.5], 1e-2, &mut rng).unwrap();
        assert_eq!(d.tx.time, 0.0);
        let ss = vec![stable1(), stable1()];
        let d = sample_tx_product(&ss, &[1.0, 2.0], &[1.0, 2.0], 1e-2, &mut rng).unwrap();
        assert_eq!(d.tx.time, 0.0);
        assert_eq!(d.per_coordinate, Some(vec![0.0, 0.0]));
    }

    #[test]
    fn product_time_is_max() {
        let mut rng = make_rng_stream(7, "tx", 0);
        let ss = vec![stable1(), stable1()];
        for _ in 0..200 {
            let d = sample_tx_product(&ss, &[0.0, 0.0], &[1.0, 1.0], 1e-2, &mut rng).unwrap();
            let p = d.per_coordinate.as_ref().unwrap();
            assert_eq!(d.tx.time, p[0].max(p[1]));
        }
        assert!(sample_tx_product(&ss[..1], &[0.0, 0.0], &[1.0, 1.0], 1e-2, &mut rng).is_err());
    }

    #[test]
    fn coupled_points_coincide() {
        let mut rng = make_rng_stream(8, "marg", 0);
        let mut seen = (0, 0);
        for _ in 0..2000 {
            let m = simulate_coupled_marginals(&stable1(), &[0.0, 0.0], &[1.0, 0.5], 1.0, &mut rng).unwrap();
            if m.coupled {
                assert_eq!(m.first, m.second);
                seen.0 += 1;
            } else {
                let r = reflect(&[0.0, 0.0], &[1.0, 0.5], &m.first).unwrap();
                assert_eq!(m.second, r);
                seen.1 += 1;
            }
        }
        assert!(seen.0 > 100 && seen.1 > 100);
    }

    #[test]
    fn first_marginal_is_gaussian_for_unit_drift() {
        let mut rng = make_rng_stream(9, "marg", 0);
        let n = 100_000;
        let v: Vec<f64> =
            (0..n).map(|_| simulate_coupled_marginals(&drift(1.0), &[0.0], &[1.0], 1.0, &mut rng).unwrap().first[0]).collect();
        let ks = ks_test_one_sample(&v, |z| crate::special::normal_cdf(z / 2f64.sqrt()), 0.01);
        assert!(ks.pass, "{ks:?}");
    }

    #[test]
    fn second_marginal_matches_independent_run() {
        let s = stable1();
        let mut rng = make_rng_stream(10, "marg", 0);
        let n = 100_000;
        let coupled: Vec<f64> =
            (0..n).map(|_| simulate_coupled_marginals(&s, &[0.0], &[1.0], 2.0, &mut rng).unwrap().second[0]).collect();
        let free: Vec<f64> = (0..n)
            .map(|_| {
                let st = s.sample_increment(2.0, &mut rng).unwrap();
                1.0 + (2.0 * st).sqrt() * normal(&mut rng)
            })
            .collect::<Vec<f64>>();
        let ks = ks_test_two_sample(&coupled, &free, 0.01);
        assert!(ks.pass, "{ks:?}");
    }

    #[test]
    fn exact_brownian_diagnostic() {
        // with S_t = t, 2 P(T^X > t) is the TV distance of N(0,2t) and N(1,2t)
        let mut rng = make_rng_stream(11, "diag", 0);
        let n = 200_000;
        let hits = (0..n).filter(|_| survival_indicators(&drift(1.0), 1.0, &[1.0], &mut rng).unwrap()[0]).count();
        let p = proportion(hits, n);
        let exact_tv = 2.0 * erf(1.0 / 4.0);
        assert!((2.0 * p.mean - exact_tv).abs() <= 6.0 * p.stderr, "{p:?} vs {exact_tv}");
    }
}
