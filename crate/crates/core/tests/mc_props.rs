use loewner_core::closed_forms::{expected_an, expected_b2n1};
use loewner_core::mc::{
    coefficients_one_path, estimate_moments, sample_path, Driver, McConfig, SamplePath, Statistic,
};
use loewner_core::words::FamilyKind;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Same backward trapezoid, written with the full sum
/// `u_n' = 2 Σ_{k<n} k X^{n−k} u_k` (odd: `w_n' = Σ_{k<n} (2k+1) X^{n−k} w_k`).
fn direct_sum(path: &SamplePath, n_max: usize, family: FamilyKind) -> Vec<Complex64> {
    let (first, last_level, coef): (usize, usize, fn(usize) -> f64) = match family {
        FamilyKind::WholePlane => (1, n_max, |k| 2.0 * k as f64),
        FamilyKind::Oddified => (0, n_max, |k| (2 * k + 1) as f64),
    };
    let mut u = vec![zero(); last_level + 1];
    u[first] = Complex64::new(1.0, 0.0);
    let deriv = |x: Complex64, u: &[Complex64]| -> Vec<Complex64> {
        let mut d = vec![zero(); last_level + 1];
        for n in first + 1..=last_level {
            for k in first..n {
                d[n] += x.powu((n - k) as u32) * u[k] * coef(k);
            }
        }
        d
    };
    let last = path.len() - 1;
    let mut d_next = deriv(path.x(last), &u);
    for i in (0..last).rev() {
        let x = path.x(i);
        // Levels in increasing order so u_k(t_i) is current for k < n.
        let mut d = vec![zero(); last_level + 1];
        for n in first + 1..=last_level {
            for k in first..n {
                d[n] += x.powu((n - k) as u32) * u[k] * coef(k);
            }
            u[n] -= (d[n] + d_next[n]) * (path.dt / 2.0);
        }
        d_next = d;
    }
    u[first + 1..].to_vec()
}

fn trapezoid(path: &SamplePath, f: impl Fn(usize) -> Complex64) -> Complex64 {
    let n = path.len() - 1;
    let inner: Complex64 = (1..n).map(&f).sum();
    (inner + (f(0) + f(n)) / 2.0) * path.dt
}

#[test]
fn brownian_increment_variance() {
    let (kappa, dt, steps) = (6.0, 1e-3, 100_000);
    let p = sample_path(&Driver::brownian(kappa), dt * steps as f64, dt, 3, 0).unwrap();
    let inc: Vec<f64> = p.values.windows(2).map(|w| w[1] - w[0]).collect();
    let var = inc.iter().map(|d| d * d).sum::<f64>() / inc.len() as f64;
    let target = kappa * dt;
    let sigma = target * (2.0 / inc.len() as f64).sqrt();
    assert!((var - target).abs() < 3.0 * sigma, "{var} vs {target}");
}

#[test]
fn full_turn_jumps_are_invisible() {
    let p = sample_path(&Driver::poisson_bernoulli(5.0), 10.0, 0.01, 11, 2).unwrap();
    assert!(p.values.iter().any(|&l| l != 0.0), "expected some jumps");
    for (i, &l) in p.values.iter().enumerate() {
        assert!((l / TAU - (l / TAU).round()).abs() < 1e-12);
        assert!((p.x(i) - Complex64::new((-p.time(i)).exp(), 0.0)).norm() < 1e-12);
    }
}

#[test]
fn composite_symbol_matches_brownian_at_integers() {
    let (kappa, lambda) = (3.0, 0.7);
    let d = Driver::composite(kappa, lambda);
    for k in 0..10 {
        assert!((d.eta(k) - kappa * (k * k) as f64 / 2.0).abs() < 1e-12);
    }
    // Off the integers the jumps are visible.
    let half = Driver::Composite { kappa, lambda, jump: TAU / 2.0 };
    assert!((half.eta(1) - (kappa / 2.0 + 2.0 * lambda)).abs() < 1e-12);
}

/// `E cos(k L_t) = e^{−t η_k}` for every driver.
#[test]
fn empirical_characteristic_function() {
    let drivers = [
        Driver::brownian(2.0),
        Driver::Stable { alpha: 1.5, kappa: 2.0 },
        Driver::Stable { alpha: 1.0, kappa: 1.0 },
        Driver::Stable { alpha: 0.7, kappa: 1.0 },
        Driver::PoissonBernoulli { lambda: 2.0, jump: 1.0 },
        Driver::Composite { kappa: 1.0, lambda: 0.25, jump: TAU / 2.0 },
    ];
    let (t, samples) = (0.5, 20_000);
    for d in drivers {
        for k in [1i64, 2] {
            let vals: Vec<f64> = (0..samples)
                .map(|s| {
                    let p = sample_path(&d, t, 0.05, 5, s).unwrap();
                    (k as f64 * p.values.last().unwrap()).cos()
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / samples as f64;
            let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples as f64 - 1.0)).sqrt();
            let want = (-t * d.eta(k)).exp();
            assert!(
                (mean - want).abs() < 4.0 * sd / (samples as f64).sqrt() + 1e-3,
                "{d} k={k}: {mean} vs {want}"
            );
        }
    }
}

#[test]
fn koebe_coefficients_at_kappa_zero() {
    let p = sample_path(&Driver::brownian(0.0), 20.0, 1.0 / 16384.0, 0, 0).unwrap();
    let a = coefficients_one_path(&p, 8, FamilyKind::WholePlane);
    for (j, c) in a.iter().enumerate() {
        let n = j + 2;
        let want = if n % 2 == 0 { -(n as f64) } else { n as f64 };
        assert!((c - Complex64::new(want, 0.0)).norm() < 1e-6, "a_{n} = {c}");
    }
    // z/(1 + z²): b_{2n+1} = (−1)^n.
    let b = coefficients_one_path(&p, 8, FamilyKind::Oddified);
    assert!((b[0].norm() - 1.0).abs() < 1e-6);
    for (j, c) in b.iter().enumerate() {
        let want = if j % 2 == 0 { -1.0 } else { 1.0 };
        assert!((c - Complex64::new(want, 0.0)).norm() < 1e-6, "b_{} = {c}", 2 * j + 3);
    }
}

#[test]
fn second_and_third_coefficients_on_one_path() {
    let p = sample_path(&Driver::brownian(6.0), 18.0, 1.0 / 512.0, 21, 0).unwrap();
    let c = coefficients_one_path(&p, 3, FamilyKind::WholePlane);
    let a2 = -2.0 * trapezoid(&p, |i| p.x(i));
    assert!((c[0] - a2).norm() < 1e-12, "{} vs {a2}", c[0]);
    // a_3 = a_2² − 2∫X², exact for the continuous recursion.
    let a3 = a2 * a2 - 2.0 * trapezoid(&p, |i| p.x(i) * p.x(i));
    assert!((c[1] - a3).norm() < 1e-4, "{} vs {a3}", c[1]);
}

#[test]
fn means_match_closed_forms() {
    let drivers = [
        Driver::brownian(6.0),
        Driver::Stable { alpha: 1.5, kappa: 2.0 },
        Driver::composite(2.0, 0.5),
        Driver::Composite { kappa: 1.0, lambda: 0.25, jump: TAU / 2.0 },
    ];
    for d in drivers {
        let mut cfg = McConfig::new(d, 3, 4000, 17, FamilyKind::WholePlane);
        cfg.dt = 1.0 / 256.0;
        let tab = estimate_moments(&cfg).unwrap();
        let sym = d.symbol(8);
        for n in [2, 3] {
            let want = expected_an::<f64>(n, &sym).unwrap().value;
            let e = tab.get(n, Statistic::Mean).unwrap();
            assert!((e.mean - Complex64::new(want, 0.0)).norm() < 3.0 * e.stderr + 2e-3, "{d} a_{n}: {} vs {want}", e.mean);
        }
        cfg.family = FamilyKind::Oddified;
        cfg.n_max = 2;
        let tab = estimate_moments(&cfg).unwrap();
        for n in [1, 2] {
            let want = expected_b2n1::<f64>(n, &sym).unwrap().value;
            let e = tab.get(2 * n + 1, Statistic::Mean).unwrap();
            assert!((e.mean.re - want).abs() < 3.0 * e.stderr + 2e-3, "{d} b_{}: {} vs {want}", 2 * n + 1, e.mean);
        }
    }
}

#[test]
fn odd_second_moments_at_kappa_four() {
    let cfg = McConfig::new(Driver::brownian(4.0), 4, 4000, 99, FamilyKind::Oddified);
    let tab = estimate_moments(&cfg).unwrap();
    for n in 1..=4 {
        let e = tab.get(2 * n + 1, Statistic::SecondMoment).unwrap();
        let want = 1.0 / (2 * n + 1) as f64;
        assert!((e.mean.re - want).abs() < 3.0 * e.stderr, "b_{}: {} ± {}", 2 * n + 1, e.mean.re, e.stderr);
    }
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let mut cfg = McConfig::new(Driver::brownian(6.0), 4, 700, 5, FamilyKind::WholePlane);
    cfg.horizon = Some(8.0);
    let runs: Vec<_> = [1, 4, 16]
        .iter()
        .map(|&t| {
            cfg.threads = Some(t);
            estimate_moments(&cfg).unwrap().estimates
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn stderr_is_sample_deviation_over_root_n() {
    let cfg = McConfig::new(Driver::brownian(2.0), 2, 300, 8, FamilyKind::WholePlane);
    let tab = estimate_moments(&cfg).unwrap();
    let vals: Vec<f64> = (0..300u64)
        .map(|s| {
            let p = sample_path(&cfg.driver, cfg.horizon(), cfg.dt, cfg.seed, s).unwrap();
            coefficients_one_path(&p, 2, FamilyKind::WholePlane)[0].norm_sqr()
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / 300.0;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 299.0).sqrt();
    let e = tab.get(2, Statistic::SecondMoment).unwrap();
    assert!((e.mean.re - mean).abs() < 1e-12 * mean);
    assert!((e.stderr - sd / 300f64.sqrt()).abs() < 1e-9 * e.stderr);
}

#[test]
fn too_few_samples_is_an_error() {
    let cfg = McConfig::new(Driver::brownian(2.0), 4, 50, 0, FamilyKind::WholePlane);
    assert!(estimate_moments(&cfg).is_err());
}

/// Halving the step or doubling the horizon moves the κ = 6 estimates by
/// less than the standard error of a 10⁴-sample run. Paths are coupled: the
/// coarse and short versions are sub-sampled and truncated from one fine path.
#[test]
fn discretization_bias_below_statistical_error() {
    let (n_max, paths) = (6, 400);
    let horizon = n_max as f64 + 12.0;
    let fine_dt = 1.0 / 1024.0;
    let fine_steps = (2.0 * horizon / fine_dt) as usize;
    let mut diff_dt = vec![0.0; n_max - 1];
    let mut diff_t = vec![0.0; n_max - 1];
    let mut sq = vec![0.0; n_max - 1];
    for s in 0..paths {
        let long = sample_path(&Driver::brownian(6.0), 2.0 * horizon, fine_dt, 31, s).unwrap();
        let base_fine = SamplePath { dt: fine_dt, values: long.values[..=fine_steps / 2].to_vec() };
        let base = SamplePath { dt: 2.0 * fine_dt, values: base_fine.values.iter().step_by(2).copied().collect() };
        let doubled_t = SamplePath { dt: 2.0 * fine_dt, values: long.values.iter().step_by(2).copied().collect() };
        let c0 = coefficients_one_path(&base, n_max, FamilyKind::WholePlane);
        let c1 = coefficients_one_path(&base_fine, n_max, FamilyKind::WholePlane);
        let c2 = coefficients_one_path(&doubled_t, n_max, FamilyKind::WholePlane);
        for j in 0..n_max - 1 {
            diff_dt[j] += (c1[j].norm_sqr() - c0[j].norm_sqr()) / paths as f64;
            diff_t[j] += (c2[j].norm_sqr() - c0[j].norm_sqr()) / paths as f64;
            sq[j] += c0[j].norm_sqr().powi(2) / paths as f64;
        }
    }
    for j in 0..n_max - 1 {
        // E|a_n|² = 1, so the 10⁴-sample stderr is √(E|a_n|⁴ − 1)/100.
        let stderr = (sq[j] - 1.0).max(0.0).sqrt() / 100.0;
        assert!(diff_dt[j].abs() < stderr, "a_{}: dt shift {} vs {stderr}", j + 2, diff_dt[j]);
        assert!(diff_t[j].abs() < stderr, "a_{}: T shift {} vs {stderr}", j + 2, diff_t[j]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_recursion_matches_full_sum(seed in 0u64..1000, kappa in 0.0f64..8.0, n_max in 2usize..7, odd in any::<bool>()) {
        let p = sample_path(&Driver::brownian(kappa), 3.0, 0.01, seed, 0).unwrap();
        let family = if odd { FamilyKind::Oddified } else { FamilyKind::WholePlane };
        let fast = coefficients_one_path(&p, n_max, family);
        let slow = direct_sum(&p, n_max, family);
        prop_assert_eq!(fast.len(), slow.len());
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn path_invariants(seed in 0u64..1000, index in 0u64..1000, alpha in 0.3f64..2.0) {
        let p = sample_path(&Driver::Stable { alpha, kappa: 1.0 }, 1.0, 0.01, seed, index).unwrap();
        prop_assert_eq!(p.values[0], 0.0);
        for i in [0, 50, 100] {
            prop_assert!((p.x(i).norm() - (-p.time(i)).exp()).abs() < 1e-14);
        }
        prop_assert_eq!(&p, &sample_path(&Driver::Stable { alpha, kappa: 1.0 }, 1.0, 0.01, seed, index).unwrap());
    }
}
