//! Zeros of `1 - g(z)` for a continuous and a lattice law, with the residue
//! of the renewal density at each one computed two ways.

use renewal::residue::{residue_numeric, residue_simple, IntegrandKind};
use renewal::rootfinder::{find_roots, SearchRegion};
use renewal::DistributionModel;

fn show(name: &str, model: &DistributionModel, r0: f64, kind: IntegrandKind) -> renewal::Result<()> {
    let set = find_roots(model, &SearchRegion::for_model(model, r0))?;
    println!("{name}: {} roots with Re z < {}", set.total_count, set.r0);
    for r in &set.roots {
        let simple = residue_simple(r, kind, model)?;
        // the contour value carries the factor e^{-(z + shift) x}; x = 0 strips it
        let numeric = residue_numeric(model, r.location, kind, 0.0, None)?;
        println!(
            "  z = {:>30}  m = {}  residue {:>36}  |contour - closed| = {:.1e}",
            format!("{:.10}", r.location),
            r.multiplicity,
            format!("{:.10}", simple),
            (numeric - simple).norm()
        );
    }
    Ok(())
}

fn main() -> renewal::Result<()> {
    show("uniform(0,1)", &DistributionModel::uniform01(), 2.5, IntegrandKind::Density)?;
    show("negative binomial(0.4, 3)", &DistributionModel::negative_binomial(0.4, 3)?, 2.0, IntegrandKind::Mass)?;
    Ok(())
}
