//! Renewal density of Erlang(2, 1): the residue expansion is exact and
//! matches `u(x) = (1 - e^{-2x}) / 2`.

use renewal::expansion::{expand_density, expand_U};
use renewal::DistributionModel;

fn main() -> renewal::Result<()> {
    let model = DistributionModel::erlang(2, 1.0)?;
    let density = expand_density(&model, 5.0)?;
    let u = expand_U(&model, 5.0)?;
    println!("exact: {}  terms: {}", density.exact, density.terms.len());
    println!("U(x) = {:.6} x + {:.6} + v(x)", u.linear_part.slope, u.linear_part.intercept);
    println!("{:>5} {:>14} {:>14} {:>10}", "x", "expansion", "closed form", "U(x)");
    for i in 0..=8 {
        let x = 0.5 * i as f64;
        let closed = 0.5 * (1.0 - (-2.0 * x).exp());
        println!("{x:>5.1} {:>14.10} {:>14.10} {:>10.6}", density.value(x), closed, u.value(x));
    }
    Ok(())
}
