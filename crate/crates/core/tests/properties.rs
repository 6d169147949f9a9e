mod common;

use common::{family, roots, Instance};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use renewal::cmath::{c, re};
use renewal::models::{tilt_ladder_continuous, tilt_ladder_discrete};
use renewal::rootfinder::{find_roots, lundberg_root_continuous, lundberg_root_discrete};
use renewal::DistributionModel;

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

/// `|g(z)| ≤ g(Re z)` and the first derivative against central differences.
fn model_properties(inst: &Instance) -> Result<(), TestCaseError> {
    let m = &inst.model;
    for &(u, v) in &inst.probes {
        let z = inst.point(u, v);
        let g = m.mgf(z).map_err(|e| fail(e.to_string()))?;
        let g_re = m.mgf(re(z.re)).map_err(|e| fail(e.to_string()))?;
        prop_assert!(g.norm() <= g_re.re * (1.0 + 1e-12), "|g({})| = {} > g(Re z) = {}", z, g.norm(), g_re.re);
        let h = 1e-5;
        let fd = (m.mgf(z + h).unwrap() - m.mgf(z - h).unwrap()) / (2.0 * h);
        let d = m.mgf_derivative(z, 1).map_err(|e| fail(e.to_string()))?;
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "g'({}) = {} but difference quotient {}", z, d, fd);
    }
    Ok(())
}

/// Origin with `g'(0) = μ`, multiplicities adding up to the count, lattice
/// roots in the fundamental strip, and monotonicity in `r0`.
fn root_properties(inst: &Instance) -> Result<(), TestCaseError> {
    let m = &inst.model;
    let set = roots(inst).map_err(fail)?;
    let origin = set.roots.iter().find(|r| r.location == re(0.0)).ok_or_else(|| fail("origin missing".into()))?;
    let mu = m.moments().mu;
    prop_assert!((origin.g_prime.re - mu).abs() <= 1e-9 * mu.max(1.0), "g'(0) = {} vs μ = {}", origin.g_prime, mu);
    let total: u32 = set.roots.iter().map(|r| r.multiplicity).sum();
    prop_assert_eq!(total, set.total_count);
    if m.is_lattice() {
        prop_assert!(set.roots.iter().all(|r| r.location.im.abs() <= std::f64::consts::PI + 1e-12));
    }
    // a larger abscissa keeps every root
    let wider = (set.r0 + 0.37).min(match m.family() {
        renewal::models::Family::TruncatedExponential { rate, .. } => 0.5 * (set.r0 + rate),
        _ => f64::INFINITY,
    });
    let mut region = common::region(inst);
    region.r0 = wider;
    let more = find_roots(m, &region).map_err(|e| fail(e.to_string()))?;
    for r in &set.roots {
        prop_assert!(
            more.roots.iter().any(|s| (s.location - r.location).norm() <= 1e-10 * r.location.norm().max(1.0)),
            "root {} lost at r0 = {}",
            r.location,
            wider
        );
    }
    Ok(())
}

fn run_all(inst: Instance) -> Result<(), TestCaseError> {
    common::check_instance(&inst).map_err(fail)?;
    model_properties(&inst)?;
    root_properties(&inst)
}

macro_rules! family_suite {
    ($name:ident, $family:literal) => {
        proptest! {
            #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]
            #[test]
            fn $name(inst in family($family)) {
                run_all(inst)?;
            }
        }
    };
}

family_suite!(discrete_pmf, "discrete_pmf");
family_suite!(negative_binomial, "negative_binomial");
family_suite!(geometric, "geometric");
family_suite!(exponential, "exponential");
family_suite!(erlang, "erlang");
family_suite!(hyperexponential, "hyperexponential");
family_suite!(matrix_exponential, "matrix_exponential");
family_suite!(uniform01, "uniform01");
family_suite!(truncated_exponential, "truncated_exponential");

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn continuous_ladder_is_a_probability(rate in 0.3..4.0f64, d in 0.5..3.0f64, load in 1.05..3.0f64) {
        let claims = DistributionModel::truncated_exponential(rate, d).unwrap();
        let premium = load * claims.moments().mu;
        let kappa = lundberg_root_continuous(&claims, 1.0, premium).unwrap();
        let ladder = tilt_ladder_continuous(&claims, 1.0, premium, kappa).unwrap();
        prop_assert!((ladder.mgf(re(0.0)).unwrap() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn discrete_ladder_is_a_probability(w in prop::collection::vec(0.05..1.0f64, 3..6), p0 in 0.4..0.9f64) {
        // mean below one so the binomial model has positive loading
        let s: f64 = w.iter().sum();
        let mut pmf: Vec<f64> = w.iter().map(|v| v / s * (1.0 - p0)).collect();
        pmf.insert(0, p0);
        let claims = DistributionModel::discrete_pmf(pmf).unwrap();
        prop_assume!(claims.moments().mu < 0.95 && claims.tail(1.0) > 1e-3);
        let kappa = lundberg_root_discrete(&claims).unwrap();
        let ladder = tilt_ladder_discrete(&claims, kappa).unwrap();
        let total: f64 = (0..64).map(|k| ladder.lattice_mass(k)).sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "ladder mass {}", total);
        prop_assert!((ladder.mgf(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-10);
    }
}
