//! Renewal function of the uniform law on (0, 1). The roots of `e^z = 1 + z`
//! are infinite in number; each extra pair buys a faster decaying error.

use renewal::expansion::expand_U;
use renewal::oracles::uniform_renewal_series;
use renewal::DistributionModel;

fn main() -> renewal::Result<()> {
    let model = DistributionModel::uniform01();
    let xs = [0.5, 1.5, 3.0, 5.0];
    println!("{:>5} {}", "r0", xs.map(|x| format!("{:>12}", format!("err x={x}"))).join(""));
    for r0 in [1.0, 2.5, 3.5, 4.5] {
        let e = expand_U(&model, r0)?;
        let errs: Vec<String> = xs
            .iter()
            .map(|&x| format!("{:>12.2e}", (e.value(x) - uniform_renewal_series(x)).abs()))
            .collect();
        println!("{r0:>5} {}   ({} roots)", errs.join(""), e.roots.total_count);
    }
    Ok(())
}
