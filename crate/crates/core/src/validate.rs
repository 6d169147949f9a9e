//! Cross-checks between the expansions and the independent oracles, grouped
//! into suites. Used by the `validate` command and the examples.

use crate::error::{Error, Result};
use crate::expansion::{expand_density, expand_mass, expand_v};
use crate::models::DistributionModel;
use crate::oracles::{
    phase_type_density_of, renewal_grid_continuous, renewal_grid_richardson, renewal_mass_of,
    renewal_mc, ruin_discrete_dp, ruin_discrete_residual, ruin_grid_richardson, ruin_mc_bivariate, ruin_mc_continuous,
    McSettings,
};
use crate::ruin::{
    cramer_lundberg_constant, ruin_bivariate, ruin_continuous, ruin_discrete, BivariateModel, ContinuousRiskModel,
    DiscreteRiskModel,
};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lattice,
    Continuous,
    Ruin,
    Bivariate,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Self::Lattice),
            "continuous" => Ok(Self::Continuous),
            "ruin" => Ok(Self::Ruin),
            "bivariate" => Ok(Self::Bivariate),
            "all" => Ok(Self::All),
            other => Err(Error::Usage(format!(
                "unknown suite '{other}', expected one of lattice|continuous|ruin|bivariate|all"
            ))),
        }
    }
}

/// One comparison: `deviation ≤ tolerance` passes.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, deviation: f64, tolerance: f64, detail: String) -> Self {
        Self { suite, name: name.into(), deviation, tolerance, passed: deviation <= tolerance, detail }
    }

    fn failed(suite: &'static str, name: impl Into<String>, err: &Error) -> Self {
        Self {
            suite,
            name: name.into(),
            deviation: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub n_paths: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<11} {:<34} {:>12} {:>10}  result\n", "suite", "check", "deviation", "tolerance");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<11} {:<34} {:>12.3e} {:>10.1e}  {}  {}\n",
                c.suite,
                c.name,
                c.deviation,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            ));
        }
        out
    }
}

/// Runs the selected suites. `n_paths` sets every Monte Carlo sample size.
pub fn run(suite: Suite, seed: u64, n_paths: u64) -> Report {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Lattice {
        checks.extend(lattice(seed, n_paths));
    }
    if all || suite == Suite::Continuous {
        checks.extend(continuous(seed, n_paths));
    }
    if all || suite == Suite::Ruin {
        checks.extend(ruin(seed, n_paths));
    }
    if all || suite == Suite::Bivariate {
        checks.extend(bivariate(seed, n_paths));
    }
    Report { seed, n_paths, checks }
}

fn collect(suite: &'static str, items: Vec<(&str, Result<Check>)>) -> Vec<Check> {
    items
        .into_iter()
        .map(|(name, r)| r.unwrap_or_else(|e| Check::failed(suite, name, &e)))
        .collect()
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) })
}

/// Sigma distance of a Monte Carlo estimate from a reference value.
fn sigmas(estimate: f64, std_err: f64, n_paths: u64, reference: f64) -> f64 {
    (estimate - reference).abs() / std_err.max(1.0 / n_paths as f64)
}

fn lattice(seed: u64, n_paths: u64) -> Vec<Check> {
    const S: &str = "lattice";
    let mass_vs_exact = |name: &str, model: Result<DistributionModel>, r0: f64, tol: f64| -> Result<Check> {
        let model = model?;
        let e = expand_mass(&model, r0)?;
        let exact = renewal_mass_of(&model, 50)?;
        let dev = max_abs((0..=50).map(|k| e.value(k as f64) - exact[k]));
        Ok(Check::new(S, name, dev, tol, format!("{} terms, k = 0..50", e.terms.len())))
    };
    collect(
        S,
        vec![
            ("nb_mass_n2", mass_vs_exact("nb_mass_n2", DistributionModel::negative_binomial(0.4, 2), 3.0, 1e-9)),
            ("nb_mass_n3", mass_vs_exact("nb_mass_n3", DistributionModel::negative_binomial(0.4, 3), 3.0, 1e-9)),
            ("geometric_mass", mass_vs_exact("geometric_mass", DistributionModel::geometric(0.5), 3.0, 1e-12)),
            (
                "finite_pmf_mass",
                mass_vs_exact("finite_pmf_mass", DistributionModel::discrete_pmf(vec![0.2, 0.5, 0.0, 0.3]), 20.0, 1e-9),
            ),
            ("nb_renewal_mc", {
                (|| {
                    let model = DistributionModel::negative_binomial(0.4, 2)?;
                    let u = renewal_mass_of(&model, 10)?;
                    let exact: f64 = u.iter().sum();
                    let est = renewal_mc(&model, 10.0, n_paths, seed)?;
                    let dev = sigmas(est.estimate, est.std_err, n_paths, exact);
                    Ok(Check::new(S, "nb_renewal_mc", dev, 4.0, format!("U(10) = {exact:.6}, MC {:.6}", est.estimate)))
                })()
            }),
        ],
    )
}

fn continuous(seed: u64, n_paths: u64) -> Vec<Check> {
    const S: &str = "continuous";
    let xs = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
    collect(
        S,
        vec![
            ("erlang_density_closed_form", {
                (|| {
                    let m = DistributionModel::erlang(2, 2.0)?;
                    let e = expand_density(&m, 5.0)?;
                    let dev = max_abs(xs.iter().map(|&x| e.value(x) - (1.0 - (-4.0 * x).exp())));
                    Ok(Check::new(S, "erlang_density_closed_form", dev, 1e-8, "u(x) = 1 - e^{-4x}".into()))
                })()
            }),
            ("erlang_phase_type", {
                (|| {
                    let m = DistributionModel::erlang(2, 2.0)?;
                    let me = DistributionModel::matrix_exponential(vec![1.0, 0.0], vec![vec![-2.0, 2.0], vec![0.0, -2.0]])?;
                    let e = expand_density(&m, 5.0)?;
                    let dev = max_abs(xs.iter().map(|&x| phase_type_density_of(&me, x).map_or(f64::NAN, |v| v - e.value(x))));
                    Ok(Check::new(S, "erlang_phase_type", dev, 1e-8, "matrix exponential vs residues".into()))
                })()
            }),
            ("erlang_v_grid", {
                (|| {
                    let m = DistributionModel::erlang(2, 2.0)?;
                    let e = expand_v(&m, 5.0)?;
                    let g = renewal_grid_continuous(&m, 10.0, 1e-3)?;
                    let lin = e.linear_part;
                    let dev = max_abs(xs.iter().map(|&x| g.at(x) - lin.at(x) - e.value(x)));
                    Ok(Check::new(S, "erlang_v_grid", dev, 1e-4, "trapezoid grid h = 1e-3".into()))
                })()
            }),
            ("three_phase_density", {
                (|| {
                    let m = DistributionModel::matrix_exponential(
                        vec![0.5, 0.3, 0.2],
                        vec![vec![-3.0, 1.0, 0.5], vec![0.2, -2.0, 0.8], vec![0.0, 0.5, -1.5]],
                    )?;
                    let e = expand_density(&m, 20.0)?;
                    let dev = max_abs((0..20).map(|i| {
                        let x = 0.25 * i as f64;
                        phase_type_density_of(&m, x).map_or(f64::NAN, |v| v - e.value(x))
                    }));
                    Ok(Check::new(S, "three_phase_density", dev, 1e-8, format!("{} terms, 20 points", e.terms.len())))
                })()
            }),
            ("uniform_v_grid", {
                (|| {
                    let m = DistributionModel::uniform01();
                    let e = expand_v(&m, 4.5)?;
                    let g = renewal_grid_richardson(&m, 8.0, 2e-3)?;
                    let lin = e.linear_part;
                    // error in units of the remainder scale e^{-R0 x}, floored at the grid accuracy
                    let dev = max_abs([2.0, 4.0, 6.0, 8.0].iter().map(|&x| {
                        let ev = e.evaluate(x);
                        (g.at(x) - lin.at(x) - ev.value) / (ev.remainder_scale + 1e-12)
                    }));
                    Ok(Check::new(S, "uniform_v_grid", dev, 1.0, format!("{} roots, error / e^(-R0 x)", e.terms.len())))
                })()
            }),
            ("exponential_renewal_mc", {
                (|| {
                    let m = DistributionModel::exponential(2.0)?;
                    let est = renewal_mc(&m, 5.0, n_paths, seed)?;
                    let dev = sigmas(est.estimate, est.std_err, n_paths, 11.0);
                    Ok(Check::new(S, "exponential_renewal_mc", dev, 4.0, format!("U(5) = 11, MC {:.5}", est.estimate)))
                })()
            }),
        ],
    )
}

fn ruin(seed: u64, n_paths: u64) -> Vec<Check> {
    const S: &str = "ruin";
    let settings = McSettings::new(n_paths, seed);
    collect(
        S,
        vec![
            ("exponential_single_term", {
                (|| {
                    let m = ContinuousRiskModel::new(DistributionModel::exponential(3.0)?, 1.0, 1.0)?;
                    let e = ruin_continuous(&m, 5.0)?;
                    let dev = if e.terms.len() == 1 { (e.terms[0].coeffs[0].re - 1.0 / 3.0).abs() } else { f64::INFINITY };
                    Ok(Check::new(S, "exponential_single_term", dev, 1e-12, format!("{} term(s)", e.terms.len())))
                })()
            }),
            ("exponential_mc", {
                (|| {
                    let claims = DistributionModel::exponential(3.0)?;
                    let est = ruin_mc_continuous(&claims, 1.0, 1.0, 1.0, settings)?;
                    let exact = (-2.0f64).exp() / 3.0;
                    let dev = sigmas(est.estimate, est.std_err, n_paths, exact);
                    Ok(Check::new(S, "exponential_mc", dev, 3.0, format!("psi(1) = {exact:.6}, MC {:.6}", est.estimate)))
                })()
            }),
            ("erlang_constant_grid", {
                (|| {
                    let claims = DistributionModel::erlang(2, 2.0)?;
                    let m = ContinuousRiskModel::new(claims.clone(), 1.0, 1.5)?;
                    let c = cramer_lundberg_constant(&m)?;
                    let g = ruin_grid_richardson(&claims, 1.0, 1.5, 20.0, 1e-2)?;
                    let dev = (g.at(20.0) * (m.kappa * 20.0).exp() - c).abs();
                    Ok(Check::new(S, "erlang_constant_grid", dev, 1e-4, format!("C = {c:.8}")))
                })()
            }),
            ("stop_loss_expansion_grid", {
                (|| {
                    let claims = DistributionModel::truncated_exponential(1.0, 2.0)?;
                    let m = ContinuousRiskModel::new(claims.clone(), 1.0, 1.5)?;
                    let e = ruin_continuous(&m, 3.0)?;
                    let g = ruin_grid_richardson(&claims, 1.0, 1.5, 6.0, 5e-3)?;
                    let dev = max_abs([2.0, 4.0, 6.0].iter().map(|&x| g.at(x) - e.evaluate(x)));
                    Ok(Check::new(S, "stop_loss_expansion_grid", dev, 1e-3, format!("{} terms", e.terms.len())))
                })()
            }),
            ("discrete_two_point", {
                (|| {
                    let claims = DistributionModel::discrete_pmf(vec![0.7, 0.0, 0.3])?;
                    let e = ruin_discrete(&DiscreteRiskModel::new(claims.clone())?, 3.0)?;
                    let dp = ruin_discrete_dp(&claims, 40)?;
                    let dev = max_abs((1..=40).map(|x| dp[x] - e.evaluate(x as f64)));
                    Ok(Check::new(S, "discrete_two_point", dev, 1e-12, "expansion vs dynamic programme".into()))
                })()
            }),
            ("discrete_dp_residual", {
                (|| {
                    let claims = DistributionModel::negative_binomial(0.2, 2)?;
                    let dp = ruin_discrete_dp(&claims, 60)?;
                    let dev = ruin_discrete_residual(&claims, &dp)?;
                    Ok(Check::new(S, "discrete_dp_residual", dev, 1e-12, "negative binomial claims".into()))
                })()
            }),
        ],
    )
}

/// Reinsurer premium used for the stop-loss pair in the bivariate suite.
pub const STOP_LOSS_REINSURER_PREMIUM: f64 = 0.5;

/// The stop-loss pair `λ = 1, d = 2, α = 1, c1 = 1.5` with the reinsurer at
/// `STOP_LOSS_REINSURER_PREMIUM`.
pub fn stop_loss_pair() -> Result<BivariateModel> {
    BivariateModel::stop_loss(1.0, 2.0, 1.0, 1.5, STOP_LOSS_REINSURER_PREMIUM)
}

/// `n` log-spaced directions on `[lo, hi]`.
pub fn direction_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn bivariate(seed: u64, n_paths: u64) -> Vec<Check> {
    const S: &str = "bivariate";
    let mut out = Vec::new();
    let model = match stop_loss_pair() {
        Ok(m) => m,
        Err(e) => return vec![Check::failed(S, "stop_loss_pair", &e)],
    };
    let regions: Result<Vec<_>> =
        direction_grid(0.1, 10.0, 100).into_iter().map(|q| ruin_bivariate(&model, q).map(|r| r.region)).collect();
    match regions {
        Ok(labels) => {
            let switches = labels.windows(2).filter(|w| w[0] != w[1]).count();
            let mut distinct = labels.clone();
            distinct.dedup();
            let ok = switches == 2 && distinct.len() == 3;
            out.push(Check::new(
                S,
                "stop_loss_three_regions",
                if ok { 0.0 } else { 1.0 },
                0.0,
                format!("{} switches: {}", switches, distinct.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" -> ")),
            ));
        }
        Err(e) => out.push(Check::failed(S, "stop_loss_three_regions", &e)),
    }
    let settings = McSettings::new(n_paths, seed);
    for q in [0.5, 2.0, 5.0] {
        let name = format!("sandwich_q{q}");
        match ruin_mc_bivariate(&model, 2.0, 2.0 * q, settings) {
            Ok(est) => {
                let se = (est.first.std_err.powi(2) + est.second.std_err.powi(2) + est.either.std_err.powi(2)).sqrt();
                let below = (est.first.estimate - est.either.estimate).max(0.0);
                let above = (est.either.estimate - est.first.estimate - est.second.estimate).max(0.0);
                out.push(Check::new(
                    S,
                    name,
                    below.max(above) / se.max(1.0 / n_paths as f64),
                    3.0,
                    format!(
                        "psi1 {:.5} psi_or {:.5} psi1+psi2 {:.5}",
                        est.first.estimate,
                        est.either.estimate,
                        est.first.estimate + est.second.estimate
                    ),
                ));
            }
            Err(e) => out.push(Check::failed(S, name, &e)),
        }
    }
    out
}

