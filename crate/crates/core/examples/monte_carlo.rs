//! Ruin probabilities of the stop-loss insurer: residue expansion, the
//! renewal-equation grid and simulation side by side.

use renewal::oracles::{ruin_grid_richardson, ruin_mc_continuous, McSettings};
use renewal::ruin::{ruin_continuous, ContinuousRiskModel};
use renewal::DistributionModel;

fn main() -> renewal::Result<()> {
    let claims = DistributionModel::truncated_exponential(1.0, 2.0)?;
    let model = ContinuousRiskModel::new(claims.clone(), 1.0, 1.5)?;
    let e = ruin_continuous(&model, 3.0)?;
    let grid = ruin_grid_richardson(&claims, 1.0, 1.5, 6.0, 5e-3)?;
    let settings = McSettings::new(200_000, 42);
    // at x = 0 none of the oscillating terms decay, so the truncated sum is poor there
    for x in [0.0, 2.0, 4.0, 6.0] {
        let mc = ruin_mc_continuous(&claims, 1.0, 1.5, x, settings)?;
        println!(
            "x = {x}: expansion {:.6}  grid {:.6}  simulation {:.6} ± {:.6}",
            e.evaluate(x),
            grid.at(x),
            mc.estimate,
            mc.std_err
        );
    }
    Ok(())
}
