use super::*;
use crate::harness::rng::make_rng_stream;
use crate::stats::{ks_test_one_sample, ks_test_two_sample, mean_stderr, proportion};

fn stable1() -> SubordinatorSampler {
    SubordinatorSampler::exact(BernsteinSpec::stable_pow(1.0).unwrap()).unwrap()
}

fn gamma1() -> SubordinatorSampler {
    SubordinatorSampler::exact(BernsteinSpec::geometric_stable(1.0).unwrap()).unwrap()
}

fn drift(b: f64) -> SubordinatorSampler {
    SubordinatorSampler::exact(BernsteinSpec::linear(b).unwrap()).unwrap()
}

fn relativistic() -> SubordinatorSampler {
    SubordinatorSampler::exact(BernsteinSpec::relativistic(1.0, 1.0).unwrap()).unwrap()
}

fn all_samplers() -> Vec<SubordinatorSampler> {
    vec![
        stable1(),
        gamma1(),
        relativistic(),
        drift(1.0),
        SubordinatorSampler::exact(BernsteinSpec::mixed_stable(0.5, 1.5).unwrap()).unwrap(),
        SubordinatorSampler::new(
            BernsteinSpec::relativistic(1.0, 1.0).unwrap(),
            StrategyName::CompoundPoissonApprox { epsilon: 1e-3 },
        )
        .unwrap(),
    ]
}

#[test]
fn drift_increment_is_deterministic() {
    let mut rng = make_rng_stream(0, "t", 0);
    assert_eq!(drift(1.0).sample_increment(3.0, &mut rng).unwrap(), 3.0);
}

#[test]
fn gamma_increment_mean() {
    let mut rng = make_rng_stream(1, "t", 0);
    let s = gamma1();
    let v: Vec<f64> = (0..100_000).map(|_| s.sample_increment(2.0, &mut rng).unwrap()).collect();
    let m = mean_stderr(&v);
    assert!((m.mean - 2.0).abs() <= 3.0 * (2.0f64 / 1e5).sqrt(), "{}", m.mean);
}

#[test]
fn stable_laplace_at_one() {
    let mut rng = make_rng_stream(2, "t", 0);
    let c = stable1().validate_laplace(1.0, 1.0, 100_000, &mut rng).unwrap();
    assert!((c.target - 0.367_879_441_171_442_3).abs() < 1e-15);
    assert!(c.pass, "{c:?}");
}

#[test]
fn drift_path() {
    let mut rng = make_rng_stream(0, "t", 0);
    assert_eq!(drift(2.0).sample_path(&[1.0, 2.0, 3.0], &mut rng).unwrap(), vec![2.0, 4.0, 6.0]);
}

#[test]
fn paths_are_nondecreasing() {
    let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.05).collect();
    for (k, s) in all_samplers().iter().enumerate() {
        let mut rng = make_rng_stream(3, "path", k as u64);
        for _ in 0..20 {
            let p = s.sample_path(&grid, &mut rng).unwrap();
            assert!(p[0] >= 0.0);
            assert!(p.windows(2).all(|w| w[1] >= w[0]), "{:?}", s.strategy());
        }
    }
}

#[test]
fn bad_grids_rejected() {
    let mut rng = make_rng_stream(0, "t", 0);
    let s = drift(1.0);
    assert!(s.sample_path(&[0.0, 1.0], &mut rng).is_err());
    assert!(s.sample_path(&[1.0, 1.0], &mut rng).is_err());
    assert!(s.sample_increment(0.0, &mut rng).is_err());
}

#[test]
fn gamma_path_increment_is_exponential() {
    let mut rng = make_rng_stream(4, "t", 0);
    let s = gamma1();
    let v: Vec<f64> = (0..100_000)
        .map(|_| {
            let p = s.sample_path(&[1.0, 2.0], &mut rng).unwrap();
            p[1] - p[0]
        })
        .collect();
    let ks = ks_test_one_sample(&v, |x| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() }, 0.01);
    assert!(ks.pass, "{ks:?}");
}

#[test]
fn drift_first_passage_is_exact() {
    let mut rng = make_rng_stream(0, "t", 0);
    let r = drift(1.0).first_passage(5.0, 0.01, &mut rng).unwrap();
    assert_eq!(r.time, 5.0);
    assert!(r.pre_level < 5.0 && 5.0 <= r.post_level);
    let r = drift(2.0).first_passage(5.0, 0.01, &mut rng).unwrap();
    assert_eq!(r.time, 2.5);
}

#[test]
fn first_passage_bracket_invariant() {
    for (k, s) in all_samplers().iter().enumerate() {
        let mut rng = make_rng_stream(5, "fp", k as u64);
        for &level in &[1e-3, 0.7, 1.0, 25.0] {
            for _ in 0..200 {
                let r = s.first_passage(level, 1e-2, &mut rng).unwrap();
                assert!(!r.censored);
                assert!(r.pre_level < level && level <= r.post_level, "{r:?} {:?}", s.strategy());
                if !s.is_deterministic() {
                    assert!(r.step <= 1e-2 * r.time * (1.0 + 1e-12), "{r:?}");
                }
            }
        }
    }
}

#[test]
fn first_passage_horizon_censors() {
    let mut rng = make_rng_stream(6, "fp", 0);
    let r = stable1().first_passage_with(1e6, PassageOptions::new(0.01).with_horizon(2.0), &mut rng).unwrap();
    assert!(r.censored);
    assert_eq!(r.time, 2.0);
    assert!(r.post_level < 1e6);
    let r = drift(1.0).first_passage_with(5.0, PassageOptions::new(0.01).with_horizon(2.0), &mut rng).unwrap();
    assert!(r.censored && r.post_level == 2.0);
}

#[test]
fn first_passage_budget() {
    let mut rng = make_rng_stream(6, "fp", 1);
    let opts = PassageOptions { tol: 0.01, horizon: None, max_steps: 10 };
    let err = stable1().first_passage_with(1.0, PassageOptions { tol: 1e-9, ..opts }, &mut rng);
    assert!(matches!(err, Err(LabError::Budget(_))));
}

#[test]
fn first_passage_mean_matches_fine_grid() {
    // For the 1/2-stable subordinator P(T > t) = P(S_1 < t^{-2}), so
    // E T = E S_1^{-1/2} = 2/√π. A brute-force walk on a 1e-4 grid is the
    // independent oracle; its bias is about half a step.
    let s = stable1();
    let n = 10_000;
    let mut rng = make_rng_stream(7, "fp", 0);
    let fast: Vec<f64> = (0..n).map(|_| s.first_passage(1.0, 5e-3, &mut rng).unwrap().time).collect();
    let mut rng = make_rng_stream(7, "fine", 0);
    let h = 1e-4;
    let fine: Vec<f64> = (0..2_000)
        .map(|_| {
            let (mut t, mut x) = (0.0, 0.0);
            while x < 1.0 {
                x += s.sample_increment(h, &mut rng).unwrap();
                t += h;
            }
            t
        })
        .collect();
    let (a, b) = (mean_stderr(&fast), mean_stderr(&fine));
    let combined = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() <= 3.0 * combined, "{a:?} vs {b:?}");
    let exact = 2.0 / std::f64::consts::PI.sqrt();
    assert!((a.mean - exact).abs() <= 3.0 * a.stderr, "{a:?} vs {exact}");
}

#[test]
fn laplace_examples() {
    let mut rng = make_rng_stream(8, "lap", 0);
    let c = drift(1.0).validate_laplace(1.0, 1.0, 10_000, &mut rng).unwrap();
    assert_eq!(c.mc_mean, (-1.0f64).exp());
    assert!(c.pass);
    let c = gamma1().validate_laplace(1.0, 2.0, 100_000, &mut rng).unwrap();
    assert!((c.target - 0.25).abs() < 1e-15);
    assert!(c.pass, "{c:?}");
    let c = relativistic().validate_laplace(3.0, 1.0, 100_000, &mut rng).unwrap();
    assert!((c.target - (-1.0f64).exp()).abs() < 1e-15);
    assert!(c.pass, "{c:?}");
    assert!(drift(1.0).validate_laplace(1.0, 1.0, 100, &mut rng).is_err());
}

#[test]
fn increment_splitting_consistency() {
    let n = 50_000;
    for (k, s) in all_samplers().iter().enumerate() {
        if s.is_deterministic() {
            continue;
        }
        let mut rng = make_rng_stream(9, "split", k as u64);
        let whole: Vec<f64> = (0..n).map(|_| s.sample_increment(1.0, &mut rng).unwrap()).collect();
        let halves: Vec<f64> = (0..n)
            .map(|_| s.sample_increment(0.5, &mut rng).unwrap() + s.sample_increment(0.5, &mut rng).unwrap())
            .collect();
        let ks = ks_test_two_sample(&whole, &halves, 0.01);
        assert!(ks.pass, "{:?}: {ks:?}", s.strategy());
    }
}

#[test]
fn strategy_mismatch_rejected() {
    let stable = BernsteinSpec::stable_pow(1.0).unwrap();
    assert!(SubordinatorSampler::new(stable.clone(), StrategyName::ExactGamma).is_err());
    assert!(SubordinatorSampler::new(stable.clone(), StrategyName::DriftOnly).is_err());
    assert!(SubordinatorSampler::new(BernsteinSpec::geometric_stable(0.5).unwrap(), StrategyName::ExactGamma).is_err());
    assert!(SubordinatorSampler::exact(BernsteinSpec::log_up(1.0, 0.5).unwrap()).is_err());
    assert!(SubordinatorSampler::new(
        BernsteinSpec::log_up(1.0, 0.5).unwrap(),
        StrategyName::CompoundPoissonApprox { epsilon: 1e-3 }
    )
    .is_err());
    assert!(SubordinatorSampler::new(stable, StrategyName::CompoundPoissonApprox { epsilon: 0.0 }).is_err());
}

#[test]
fn compound_poisson_stable_laplace() {
    let s = SubordinatorSampler::new(
        BernsteinSpec::stable_pow(1.0).unwrap(),
        StrategyName::CompoundPoissonApprox { epsilon: 1e-4 },
    )
    .unwrap();
    let mut rng = make_rng_stream(10, "cp", 0);
    let c = s.validate_laplace(1.0, 1.0, 50_000, &mut rng).unwrap();
    assert!(c.pass, "{c:?}");
}

#[test]
fn cp_levy_no_jump_probability() {
    let d = SymmetricLevyDensity::custom(|z| if (0.99..=1.01).contains(&z) { 25.0 } else { 0.0 }, 1.01);
    let s = CpLevySampler::new(&d, 0.5).unwrap();
    assert!((s.jump_rate() - 1.0).abs() < 1e-6, "{}", s.jump_rate());
    assert_eq!(s.small_jump_variance(), 0.0);
    let mut rng = make_rng_stream(11, "cp", 0);
    let n = 100_000;
    let none = (0..n).filter(|_| s.sample_counting(1.0, &mut rng).unwrap().1 == 0).count();
    let p = proportion(none, n);
    assert!((p.mean - (-1.0f64).exp()).abs() <= 3.0 * p.stderr, "{p:?}");
}

#[test]
fn cp_levy_truncated_stable_moments() {
    let d = SymmetricLevyDensity::truncated_stable(1.0, 0.5, 1.0);
    let mut rng = make_rng_stream(12, "cp", 0);
    let v: Vec<f64> = (0..100_000).map(|_| sample_cp_levy_increment(&d, 0.01, 1.0, &mut rng).unwrap()).collect();
    let m = mean_stderr(&v);
    assert!(m.mean.abs() <= 3.0 * m.stderr, "{m:?}");
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let q = mean_stderr(&sq);
    assert!((q.mean - 4.0 / 3.0).abs() <= 3.0 * q.stderr, "{q:?}");
}

#[test]
fn cp_levy_custom_matches_closed_form() {
    let closed = CpLevySampler::new(&SymmetricLevyDensity::truncated_stable(1.0, 0.5, 1.0), 0.01).unwrap();
    let custom = CpLevySampler::new(&SymmetricLevyDensity::custom(|z| z.powf(-1.5), 1.0), 0.01).unwrap();
    assert!((closed.jump_rate() - custom.jump_rate()).abs() < 1e-9 * closed.jump_rate());
    assert!((closed.small_jump_variance() - custom.small_jump_variance()).abs() < 1e-9);
}

#[test]
fn cp_levy_rejects_infinite_support() {
    let d = SymmetricLevyDensity::truncated_stable(1.0, 0.5, f64::INFINITY);
    assert!(CpLevySampler::new(&d, 0.01).is_err());
}

#[test]
fn strategy_names_parse_strictly() {
    let all = [
        StrategyName::Auto,
        StrategyName::ExactStable,
        StrategyName::ExactGamma,
        StrategyName::TemperedStableRejection,
        StrategyName::DriftOnly,
        StrategyName::SumOfComponents,
        StrategyName::CompoundPoissonApprox { epsilon: 1e-3 },
    ];
    for s in all {
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<StrategyName>(&text).unwrap(), s, "{text}");
    }
    for bad in [
        r#"{"strategy":"exact_stable","epsilon":1}"#,
        r#"{"strategy":"compound_poisson_approx"}"#,
        r#"{"strategy":"exact_gamma","shape":2}"#,
        r#"{"strategy":"magic"}"#,
    ] {
        assert!(serde_json::from_str::<StrategyName>(bad).is_err(), "{bad}");
    }
}
