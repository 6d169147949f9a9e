use super::sampling::Sampler;
use crate::error::{Error, Result};
use crate::models::DistributionModel;
use crate::rootfinder::lundberg_root_continuous;
use crate::ruin::BivariateModel;
use crate::models::Family;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McSettings {
    pub n_paths: u64,
    pub seed: u64,
    /// Time horizon used when the loading is not positive (no Lundberg
    /// exponent to bound the bias).
    pub horizon: f64,
}

impl McSettings {
    pub fn new(n_paths: u64, seed: u64) -> Self {
        Self { n_paths, seed, horizon: 1e4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_err: f64,
    pub n_paths: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self { estimate: p, std_err: (p * (1.0 - p) / n as f64).sqrt(), n_paths: n }
    }

    /// `|value - estimate| ≤ k·std_err`, with a one-path floor on the error
    /// so that zero-variance estimates still compare sensibly.
    pub fn agrees(&self, value: f64, k: f64) -> bool {
        let se = self.std_err.max(1.0 / self.n_paths as f64);
        (value - self.estimate).abs() <= k * se
    }
}

/// Per-path generator: one ChaCha stream per path index, so results do
/// not depend on how paths are spread over threads.
fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Reserve above which the Lundberg bound `e^{-κu}` puts the remaining
/// ruin probability below a tenth of the smallest resolvable frequency.
fn safe_level(kappa: f64, n_paths: u64) -> f64 {
    (10.0 * n_paths as f64).ln() / kappa
}

/// Ruin frequency of `x + ct - Σ Z_i` over `n_paths` independent paths.
pub fn ruin_mc_continuous(
    claims: &DistributionModel,
    alpha: f64,
    premium: f64,
    x: f64,
    settings: McSettings,
) -> Result<McEstimate> {
    if settings.n_paths == 0 {
        return Err(Error::Usage("n_paths must be positive".into()));
    }
    let sampler = Sampler::new(claims)?;
    let arrivals = Exp::new(alpha).map_err(|_| Error::InvalidModel("alpha must be positive".into()))?;
    let (cap, horizon) = match lundberg_root_continuous(claims, alpha, premium) {
        Ok(kappa) => (x.max(0.0) + safe_level(kappa, settings.n_paths), f64::INFINITY),
        Err(Error::NegativeLoading { .. }) => (f64::INFINITY, settings.horizon),
        Err(e) => return Err(e),
    };
    let hits: u64 = (0..settings.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = path_rng(settings.seed, path);
            let mut reserve = x;
            let mut t = 0.0;
            loop {
                let w = arrivals.sample(&mut rng);
                t += w;
                if t > horizon {
                    return 0;
                }
                reserve += premium * w - sampler.sample(&mut rng);
                if reserve < 0.0 {
                    return 1;
                }
                if reserve >= cap {
                    return 0;
                }
            }
        })
        .sum();
    Ok(McEstimate::from_hits(hits, settings.n_paths))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BivariateMcEstimate {
    pub first: McEstimate,
    pub second: McEstimate,
    /// At least one of the two companies is ruined.
    pub either: McEstimate,
}

/// Joint simulation of two companies with capitals `x1`, `x2`. A stop-loss
/// pair shares its claims (`min(V, d)` and `(V - d)^+` of the same `V`);
/// any other pair is simulated independently.
pub fn ruin_mc_bivariate(model: &BivariateModel, x1: f64, x2: f64, settings: McSettings) -> Result<BivariateMcEstimate> {
    let a = &model.first;
    let b = &model.second;
    let cap1 = x1.max(0.0) + safe_level(a.kappa, settings.n_paths);
    let cap2 = x2.max(0.0) + safe_level(b.kappa, settings.n_paths);
    let treaty = stop_loss_treaty(model);
    let s1 = Sampler::new(&a.claims)?;
    let s2 = Sampler::new(&b.claims)?;
    let base = treaty.map(|(lambda, _)| Exp::new(lambda).unwrap());
    let e1 = Exp::new(a.alpha).unwrap();
    let e2 = Exp::new(b.alpha).unwrap();
    let n = settings.n_paths;
    let counts = (0..n)
        .into_par_iter()
        .map(|path| {
            let mut rng = path_rng(settings.seed, path);
            let (r1, r2) = match (treaty, &base) {
                (Some((_, d)), Some(v)) => {
                    joint_path(&mut rng, &e1, a.premium, b.premium, v, d, x1, x2, cap1, cap2)
                }
                _ => (
                    single_path(&mut rng, &e1, &s1, a.premium, x1, cap1),
                    single_path(&mut rng, &e2, &s2, b.premium, x2, cap2),
                ),
            };
            (r1 as u64, r2 as u64, (r1 || r2) as u64)
        })
        .reduce(|| (0, 0, 0), |p, q| (p.0 + q.0, p.1 + q.1, p.2 + q.2));
    Ok(BivariateMcEstimate {
        first: McEstimate::from_hits(counts.0, n),
        second: McEstimate::from_hits(counts.1, n),
        either: McEstimate::from_hits(counts.2, n),
    })
}

/// `(λ, d)` when the pair is insurer `min(V, d)` / reinsurer `Exp(λ)` at rate `α e^{-λd}`.
fn stop_loss_treaty(model: &BivariateModel) -> Option<(f64, f64)> {
    let (Family::TruncatedExponential { rate, priority }, Family::Exponential { rate: r2 }) =
        (model.first.claims.family(), model.second.claims.family())
    else {
        return None;
    };
    let thinned = model.first.alpha * (-rate * priority).exp();
    if (rate - r2).abs() < 1e-12 && (thinned - model.second.alpha).abs() < 1e-12 * thinned.max(1.0) {
        Some((*rate, *priority))
    } else {
        None
    }
}

fn single_path<R: Rng>(rng: &mut R, arrivals: &Exp<f64>, claims: &Sampler, premium: f64, x: f64, cap: f64) -> bool {
    let mut reserve = x;
    loop {
        let w = arrivals.sample(rng);
        reserve += premium * w - claims.sample(rng);
        if reserve < 0.0 {
            return true;
        }
        if reserve >= cap {
            return false;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn joint_path<R: Rng>(
    rng: &mut R,
    arrivals: &Exp<f64>,
    c1: f64,
    c2: f64,
    v: &Exp<f64>,
    d: f64,
    x1: f64,
    x2: f64,
    cap1: f64,
    cap2: f64,
) -> (bool, bool) {
    let (mut r1, mut r2) = (x1, x2);
    let (mut ruined1, mut ruined2) = (false, false);
    loop {
        let w = arrivals.sample(rng);
        let claim = v.sample(rng);
        r1 += c1 * w - claim.min(d);
        r2 += c2 * w - (claim - d).max(0.0);
        ruined1 |= r1 < 0.0;
        ruined2 |= r2 < 0.0;
        let done1 = ruined1 || r1 >= cap1;
        let done2 = ruined2 || r2 >= cap2;
        if done1 && done2 {
            return (ruined1, ruined2);
        }
    }
}

/// `E[N(x)]` with `N(x) = #{n ≥ 0 : S_n ≤ x}`.
pub fn renewal_mc(model: &DistributionModel, x: f64, n_paths: u64, seed: u64) -> Result<McEstimate> {
    if n_paths < 2 {
        return Err(Error::Usage("n_paths must be at least 2".into()));
    }
    if model.moments().mu <= 0.0 {
        return Err(Error::InvalidModel("renewals need a positive mean".into()));
    }
    let sampler = Sampler::new(model)?;
    let (s, s2) = (0..n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = path_rng(seed, path);
            let mut count = 0u64;
            let mut total = 0.0;
            while total <= x {
                count += 1;
                total += sampler.sample(&mut rng);
            }
            (count, count * count)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_paths as f64;
    let mean = s as f64 / n;
    let var = (s2 as f64 / n - mean * mean) * n / (n - 1.0);
    Ok(McEstimate { estimate: mean, std_err: (var.max(0.0) / n).sqrt(), n_paths })
}
