//! A three-phase matrix-exponential law: renewal density from the residue
//! expansion against the phase-type density of the renewal process.

use renewal::expansion::expand_density;
use renewal::oracles::phase_type_density_of;
use renewal::DistributionModel;

fn main() -> renewal::Result<()> {
    let alpha = vec![0.5, 0.3, 0.2];
    let t = vec![vec![-3.0, 1.0, 0.5], vec![0.2, -1.5, 0.4], vec![0.0, 0.6, -2.0]];
    let model = DistributionModel::matrix_exponential(alpha, t)?;
    let e = expand_density(&model, 20.0)?;
    println!("mean {:.6}, {} roots, exact = {}", model.moments().mu, e.roots.total_count, e.exact);
    for i in 0..=10 {
        let x = 0.6 * i as f64;
        let oracle = phase_type_density_of(&model, x)?;
        println!("x = {x:>4.1}  expansion {:.12}  oracle {:.12}", e.value(x), oracle);
    }
    Ok(())
}
