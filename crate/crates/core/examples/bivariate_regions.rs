//! Two-term asymptotics of `ψ_or(x, qx)` for an insurer and its stop-loss
//! reinsurer, swept over the direction ratio `q`.

use renewal::ruin::{ruin_bivariate, BivariateModel};
use renewal::validate::{direction_grid, stop_loss_pair};

fn main() -> renewal::Result<()> {
    let model: BivariateModel = stop_loss_pair()?;
    println!("kappa1 = {:.6}  kappa2 = {:.6}", model.first_terms.kappa, model.second_terms.kappa);
    let mut last = None;
    for q in direction_grid(0.1, 10.0, 100) {
        let r = ruin_bivariate(&model, q)?;
        if last != Some(r.region) {
            println!("q = {q:>8.4}  {:<30} d0 = {:.4}  d1 = {:.4}", r.region.to_string(), r.d0, r.d1);
            last = Some(r.region);
        }
    }
    let r = ruin_bivariate(&model, 2.0)?;
    for x in [2.0, 4.0, 8.0] {
        println!("q = 2, x = {x}: psi_or ≈ {:.6e}", r.evaluate(x));
    }
    Ok(())
}
