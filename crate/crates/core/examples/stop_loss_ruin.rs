//! Ruin expansion for an insurer under a stop-loss treaty: claims are
//! `min(V, d)` with `V ~ Exp(λ)`.

use renewal::ruin::{cramer_lundberg_constant, ruin_continuous, ContinuousRiskModel};
use renewal::DistributionModel;

fn main() -> renewal::Result<()> {
    let (lambda, d, alpha, c) = (1.0, 2.0, 1.0, 1.5);
    let claims = DistributionModel::truncated_exponential(lambda, d)?;
    let model = ContinuousRiskModel::new(claims, alpha, c)?;
    println!("kappa = {:.12}", model.kappa);
    println!("C     = {:.12}", cramer_lundberg_constant(&model)?);

    let exp = ruin_continuous(&model, 3.0)?;
    println!("{} roots with Re z < 3; the first five:", exp.terms.len());
    for t in exp.terms.iter().take(5) {
        println!("root {:>28}  coefficient {:>40}", format!("{:.8}", t.root.location), format!("{:.8}", t.coeffs[0]));
    }
    println!("{:>4} {:>14} {:>14} {:>14}", "x", "one term", "three terms", "all terms");
    for x in [0.0, 1.0, 2.0, 4.0, 6.0, 8.0] {
        println!(
            "{x:>4} {:>14.8} {:>14.8} {:>14.8}",
            exp.leading_at(1, x),
            exp.leading_at(2, x),
            exp.evaluate(x)
        );
    }
    Ok(())
}
