use super::renewal::richardson;
use super::{ErrorModel, OracleResult};
use crate::error::{Error, Result};
use crate::models::DistributionModel;
use crate::quad::integrate;

/// Ruin probabilities `ψ(0..=x_max)` of the binomial model with integer
/// claims, from the ladder renewal equation
/// `ψ(x) = Σ_{k=0}^{x-1} ψ(x-k) l(k) + L̄(x)`, `l(k) = P(Z > k)`,
/// `L̄(x) = Σ_{k ≥ x} l(k)`, solved by forward substitution.
pub fn ruin_discrete_dp(claims: &DistributionModel, x_max: usize) -> Result<Vec<f64>> {
    let (l, lbar) = ladder_tables(claims, x_max)?;
    let mut psi = vec![0.0; x_max + 1];
    psi[0] = lbar[0];
    for x in 1..=x_max {
        let mut s = lbar[x];
        for k in 1..x {
            s += psi[x - k] * l[k];
        }
        psi[x] = s / (1.0 - l[0]);
    }
    Ok(psi)
}

/// Largest residual of the ladder renewal equation over `ψ(0..)`.
pub fn ruin_discrete_residual(claims: &DistributionModel, psi: &[f64]) -> Result<f64> {
    let x_max = psi.len() - 1;
    let (l, lbar) = ladder_tables(claims, x_max)?;
    let mut worst = 0.0f64;
    for x in 0..=x_max {
        let mut s = lbar[x];
        for k in 0..x {
            s += psi[x - k] * l[k];
        }
        worst = worst.max((s - psi[x]).abs());
    }
    Ok(worst)
}

fn ladder_tables(claims: &DistributionModel, x_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !claims.is_lattice() {
        return Err(Error::InvalidModel("discrete ruin needs a lattice claim law".into()));
    }
    let m = claims.moments().mu;
    if m >= 1.0 {
        return Err(Error::NegativeLoading { loading: 1.0 - m });
    }
    let pmf = claims.truncated_pmf(1e-16)?;
    let k_max = pmf.len().max(x_max + 1);
    let l: Vec<f64> = (0..=k_max).map(|k| claims.tail(k as f64)).collect();
    let mut lbar = vec![0.0; k_max + 2];
    let beyond: f64 = {
        let mut s = 0.0;
        let mut k = k_max + 1;
        loop {
            let t = claims.tail(k as f64);
            s += t;
            if t < 1e-18 || k > k_max + 100_000 {
                break;
            }
            k += 1;
        }
        s
    };
    lbar[k_max + 1] = beyond;
    for k in (0..=k_max).rev() {
        lbar[k] = lbar[k + 1] + l[k];
    }
    Ok((l, lbar))
}

/// Ruin probability of the compound Poisson model from the defective
/// renewal equation `ψ(x) = (α/c)[∫_0^x ψ(x-y) Ḡ(y) dy + ∫_x^∞ Ḡ(y) dy]`,
/// trapezoid rule on `x_i = i h`.
pub fn ruin_grid_continuous(claims: &DistributionModel, alpha: f64, premium: f64, x_max: f64, h: f64) -> Result<OracleResult> {
    if claims.is_lattice() {
        return Err(Error::InvalidModel("continuous ruin needs a non-lattice claim law".into()));
    }
    let m = claims.moments().mu;
    let loading = premium - alpha * m;
    if loading <= 0.0 {
        return Err(Error::NegativeLoading { loading });
    }
    let n = (x_max / h).round() as usize;
    let ratio = alpha / premium;
    let tail_right = |y: f64| claims.tail(y);
    // Ḡ(y-) differs from Ḡ(y) only at atoms
    let atoms = claims.atoms();
    let tail_left = |y: f64| claims.tail(y) + atoms.iter().filter(|(a, _)| *a == y).map(|(_, p)| p).sum::<f64>();
    let gbar: Vec<f64> = (0..=n)
        .map(|j| {
            let y = j as f64 * h;
            if j == 0 { tail_right(0.0) } else { 0.5 * (tail_left(y) + tail_right(y)) }
        })
        .collect();
    // ∫_{x_i}^∞ Ḡ = m - ∫_0^{x_i} Ḡ, split at atoms so the integrand is smooth
    let mut cum = vec![0.0; n + 1];
    for i in 1..=n {
        let (a, b) = ((i - 1) as f64 * h, i as f64 * h);
        let mut pts = vec![a];
        for (p, _) in &atoms {
            if *p > a && *p < b {
                pts.push(*p);
            }
        }
        pts.push(b);
        let piece: f64 = pts.windows(2).map(|w| integrate(tail_right, w[0], w[1], 1e-15)).sum();
        cum[i] = cum[i - 1] + piece;
    }
    let mut psi = vec![0.0; n + 1];
    for i in 0..=n {
        let x = i as f64 * h;
        let mut s = (m - cum[i]).max(0.0);
        if i > 0 {
            let mut conv = 0.5 * tail_left(x) * psi[0];
            for j in 1..i {
                conv += gbar[j] * psi[i - j];
            }
            s += h * conv;
        }
        let diag = if i > 0 { ratio * 0.5 * h * gbar[0] } else { 0.0 };
        psi[i] = ratio * s / (1.0 - diag);
    }
    Ok(OracleResult {
        x: (0..=n).map(|i| i as f64 * h).collect(),
        values: psi,
        method: "ruin_grid_trapezoid",
        error: ErrorModel::Grid { h, estimate: None },
    })
}

/// Richardson combination of `ruin_grid_continuous` at `h` and `h/2`.
pub fn ruin_grid_richardson(claims: &DistributionModel, alpha: f64, premium: f64, x_max: f64, h: f64) -> Result<OracleResult> {
    let coarse = ruin_grid_continuous(claims, alpha, premium, x_max, h)?;
    let fine = ruin_grid_continuous(claims, alpha, premium, x_max, 0.5 * h)?;
    richardson(coarse, fine, h, "ruin_grid_richardson")
}
