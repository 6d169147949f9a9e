//! Ruin of the binomial-type model `x + n - (Z_1 + ... + Z_n)` with
//! `P(Z = 2) = 0.3`, `P(Z = 0) = 0.7`, where `ψ(x) = (3/7)^x` for `x ≥ 1`.

use renewal::oracles::ruin_discrete_dp;
use renewal::ruin::{ruin_discrete, DiscreteRiskModel};
use renewal::DistributionModel;

fn main() -> renewal::Result<()> {
    let claims = DistributionModel::discrete_pmf(vec![0.7, 0.0, 0.3])?;
    let model = DiscreteRiskModel::new(claims.clone())?;
    let e = ruin_discrete(&model, 1.0)?;
    println!("kappa = {:.12} (ln 7/3 = {:.12})", model.kappa.unwrap(), (7.0f64 / 3.0).ln());
    println!("C     = {:.12}", e.terms[0].coeffs[0].re);
    let dp = ruin_discrete_dp(&claims, 10)?;
    println!("psi(0) = {} (dynamic programming)", dp[0]);
    for (x, want) in dp.iter().enumerate().skip(1) {
        println!("psi({x:>2}) = {:.14}  dp {want:.14}  (3/7)^x {:.14}", e.evaluate(x as f64), (3.0f64 / 7.0).powi(x as i32));
    }
    Ok(())
}
