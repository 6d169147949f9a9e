use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use renewal::expansion::{expand_density, expand_mass, expand_U};
use renewal::oracles::{
    phase_type_density_of, renewal_grid_richardson, renewal_mass_of, renewal_mc, ruin_discrete_dp,
    ruin_discrete_residual, ruin_grid_richardson, ruin_mc_continuous, uniform_renewal_series, McSettings,
};
use renewal::ruin::{cramer_lundberg_constant, ruin_continuous, ruin_discrete, ContinuousRiskModel, DiscreteRiskModel};
use renewal::DistributionModel;

/// Ruin probabilities of `x + n - Σ Z` by value iteration on the absorbing
/// walk, states `0..cap` with ψ = 0 above `cap`.
fn absorbing_walk(pmf: &[f64], x_max: usize, cap: usize) -> Vec<f64> {
    let mut psi = vec![0.0; cap + 1];
    for _ in 0..100_000 {
        let mut next = vec![0.0; cap + 1];
        let mut change = 0.0f64;
        for x in 0..=cap {
            let mut v = 0.0;
            for (z, p) in pmf.iter().enumerate() {
                let r = x as i64 + 1 - z as i64;
                v += p * if r <= 0 { 1.0 } else if r as usize > cap { 0.0 } else { psi[r as usize] };
            }
            change = change.max((v - psi[x]).abs());
            next[x] = v;
        }
        psi = next;
        if change < 1e-15 {
            break;
        }
    }
    psi.truncate(x_max + 1);
    psi
}

#[test]
fn discrete_dp_matches_absorbing_walk() {
    for pmf in [vec![0.5, 0.3, 0.1, 0.1], vec![0.7, 0.0, 0.3], vec![0.6, 0.25, 0.0, 0.0, 0.15]] {
        let claims = DistributionModel::discrete_pmf(pmf.clone()).unwrap();
        let dp = ruin_discrete_dp(&claims, 40).unwrap();
        let walk = absorbing_walk(&pmf, 40, 400);
        for x in 0..=40 {
            assert!((dp[x] - walk[x]).abs() < 1e-11, "pmf {pmf:?} x={x}: {} vs {}", dp[x], walk[x]);
        }
        assert!(ruin_discrete_residual(&claims, &dp).unwrap() < 1e-12);
    }
}

#[test]
fn geometric_claims_ruin() {
    // negative binomial with n = 1 is geometric on {0, 1, ...}
    let claims = DistributionModel::negative_binomial(0.3, 1).unwrap();
    let model = DiscreteRiskModel::new(claims.clone()).unwrap();
    let kappa = model.kappa.unwrap();
    let dp = ruin_discrete_dp(&claims, 60).unwrap();
    for x in 1..=60 {
        assert!(dp[x] <= dp[x - 1]);
        assert!(dp[x] <= (-kappa * x as f64).exp() * (1.0 + 1e-12));
    }
    let e = ruin_discrete(&model, 2.0).unwrap();
    for x in 1..=60 {
        assert!((e.evaluate(x as f64) - dp[x]).abs() < 1e-12, "x={x}");
    }
}

#[test]
fn no_claims_never_ruin() {
    let claims = DistributionModel::discrete_pmf(vec![1.0]).unwrap();
    assert!(ruin_discrete_dp(&claims, 10).unwrap().iter().all(|v| *v == 0.0));
}

/// Branch `k` of the Lambert W function by Halley iteration.
fn lambert_w(x: C, k: i32) -> C {
    let l1 = x.ln() + C::new(0.0, 2.0 * std::f64::consts::PI * k as f64);
    let mut w = if k == 0 { C::new(-0.5, 0.0) } else { l1 - l1.ln() };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if step.norm() < 1e-16 * w.norm().max(1.0) {
            break;
        }
    }
    w
}

#[test]
fn stop_loss_roots_follow_lambert_w() {
    let (lambda, d, alpha, c) = (1.0, 2.0, 1.0, 1.5);
    let m = ContinuousRiskModel::new(DistributionModel::truncated_exponential(lambda, d).unwrap(), alpha, c).unwrap();
    let a = alpha * d / c;
    let arg = C::new(-a * (-a as f64).exp(), 0.0);
    // s = z + κ = λ - α/c - W/d; the branch with W = -a gives s = λ, which is
    // not a root
    let s_of = |w: C| C::new(lambda - alpha / c, 0.0) - w / d;
    let w0 = lambda_check(lambert_w(arg, 0), arg);
    assert!((s_of(w0).re - m.kappa).abs() < 1e-12 && s_of(w0).im.abs() < 1e-12);
    let wm1 = lambda_check(lambert_w(arg, -1), arg);
    assert!((s_of(wm1) - lambda).norm() < 1e-9, "spurious branch {}", s_of(wm1));

    let r = 3.0;
    let e = ruin_continuous(&m, r).unwrap();
    let found: Vec<C> = e.terms.iter().map(|t| t.root.location).collect();
    let mut expected = vec![C::new(0.0, 0.0)];
    for k in 1..200 {
        let w = lambda_check(lambert_w(arg, k), arg);
        let z = s_of(w) - m.kappa;
        if z.re < e.remainder_exponent - m.kappa {
            expected.push(z);
            expected.push(z.conj());
        }
    }
    assert_eq!(found.len(), expected.len(), "found {found:?}");
    for z in expected {
        assert!(found.iter().any(|f| (f - z).norm() < 1e-9), "missing {z}");
    }
    // first pair
    let z1 = found[1];
    assert!((z1 - C::new(1.20431284, 3.72791162)).norm() < 1e-7, "{z1}");
}

fn lambda_check(w: C, x: C) -> C {
    assert!((w * w.exp() - x).norm() < 1e-13, "W residual at {w}");
    w
}

#[test]
fn exponential_claims_simulation_at_zero_capital() {
    let claims = DistributionModel::exponential(3.0).unwrap();
    let est = ruin_mc_continuous(&claims, 1.0, 1.0, 0.0, McSettings::new(200_000, 5)).unwrap();
    assert!((est.estimate - 1.0 / 3.0).abs() <= 3.0 * est.std_err);
}

#[test]
fn monte_carlo_is_reproducible_across_pools() {
    let claims = DistributionModel::erlang(2, 2.0).unwrap();
    let settings = McSettings::new(50_000, 9);
    let on = |n: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| ruin_mc_continuous(&claims, 1.0, 1.5, 1.0, settings).unwrap())
    };
    assert_eq!(on(1), on(3));
    let u = DistributionModel::uniform01();
    let a = renewal_mc(&u, 3.0, 10_000, 4).unwrap();
    let b = renewal_mc(&u, 3.0, 10_000, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn erlang_constant_pinned_by_grid() {
    let claims = DistributionModel::erlang(2, 2.0).unwrap();
    let m = ContinuousRiskModel::new(claims.clone(), 1.0, 1.5).unwrap();
    let c = cramer_lundberg_constant(&m).unwrap();
    let g = ruin_grid_richardson(&claims, 1.0, 1.5, 25.0, 1e-2).unwrap();
    for x in [15.0, 20.0, 25.0] {
        assert!((g.at(x) * (m.kappa * x).exp() - c).abs() < 1e-4, "x={x}");
    }
    let e = ruin_continuous(&m, 8.0).unwrap();
    for x in [0.0, 0.5, 1.0, 3.0] {
        assert!((g.at(x) - e.evaluate(x)).abs() < 1e-8, "x={x}");
    }
}

#[test]
fn simulation_agrees_with_ruin_grid() {
    let claims = DistributionModel::hyperexponential(vec![0.4, 0.6], vec![0.8, 3.0]).unwrap();
    let g = ruin_grid_richardson(&claims, 1.0, 1.2, 4.0, 5e-3).unwrap();
    let est = ruin_mc_continuous(&claims, 1.0, 1.2, 2.0, McSettings::new(200_000, 11)).unwrap();
    assert!((est.estimate - g.at(2.0)).abs() <= 3.0 * est.std_err, "{est:?} vs {}", g.at(2.0));
}

#[test]
fn random_three_phase_densities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let mut alpha: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..1.0)).collect();
        let s: f64 = alpha.iter().sum();
        alpha.iter_mut().for_each(|a| *a /= s);
        let mut t = vec![vec![0.0; 3]; 3];
        for i in 0..3 {
            let mut out = rng.random_range(0.3..2.0);
            for j in 0..3 {
                if i != j {
                    t[i][j] = rng.random_range(0.0..1.5);
                    out += t[i][j];
                }
            }
            t[i][i] = -out;
        }
        let m = DistributionModel::matrix_exponential(alpha, t).unwrap();
        let e = expand_density(&m, 30.0).unwrap();
        for i in 0..20 {
            let x = 0.3 * i as f64;
            let pt = phase_type_density_of(&m, x).unwrap();
            assert!((pt - e.value(x)).abs() < 1e-8, "x={x}: {pt} vs {}", e.value(x));
        }
    }
}

#[test]
fn renewal_oracles_agree() {
    // lattice: exact masses vs simulation
    let nb = DistributionModel::negative_binomial(0.4, 3).unwrap();
    let u: f64 = renewal_mass_of(&nb, 12).unwrap().iter().sum();
    let est = renewal_mc(&nb, 12.0, 100_000, 2).unwrap();
    assert!((est.estimate - u).abs() <= 3.5 * est.std_err);
    let e = expand_mass(&nb, 3.0).unwrap();
    let partial: f64 = (0..=12).map(|k| e.value(k as f64)).sum();
    assert!((partial - u).abs() < 1e-9);
    // continuous: grid vs simulation vs the alternating series
    let uni = DistributionModel::uniform01();
    let g = renewal_grid_richardson(&uni, 3.0, 1e-3).unwrap();
    assert!((g.at(3.0) - uniform_renewal_series(3.0)).abs() < 1e-10);
    let est = renewal_mc(&uni, 3.0, 100_000, 8).unwrap();
    assert!((est.estimate - g.at(3.0)).abs() <= 3.5 * est.std_err);
    let ex = expand_U(&uni, 4.5).unwrap();
    assert!((ex.value(3.0) - g.at(3.0)).abs() < 1e-6);
}
