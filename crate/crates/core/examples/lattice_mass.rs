//! Renewal masses of a negative binomial law against the exact recursion.

use renewal::expansion::expand_mass;
use renewal::oracles::renewal_mass_of;
use renewal::DistributionModel;

fn main() -> renewal::Result<()> {
    let model = DistributionModel::negative_binomial(0.4, 2)?;
    let exact = renewal_mass_of(&model, 12)?;
    for r0 in [0.5, 3.0] {
        let e = expand_mass(&model, r0)?;
        println!("r0 = {r0}: {} terms, origin atom {}, exact = {}", e.terms.len(), e.origin_atom, e.exact);
        for (k, want) in exact.iter().enumerate().step_by(3) {
            let got = e.value(k as f64);
            println!("  u({k:>2}) = {got:.12}  recursion {want:.12}  error {:.1e}", (got - want).abs());
        }
    }
    Ok(())
}
