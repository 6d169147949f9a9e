#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use renewal::cmath::{c, C};
use renewal::expansion::{expand_density, expand_mass};
use renewal::residue::{residue_numeric, residue_simple, IntegrandKind};
use renewal::rootfinder::{count_zeros, find_roots, Rect, RootSet, SearchRegion};
use renewal::DistributionModel;

pub const FAMILIES: [&str; 9] = [
    "discrete_pmf",
    "negative_binomial",
    "geometric",
    "exponential",
    "erlang",
    "hyperexponential",
    "matrix_exponential",
    "uniform01",
    "truncated_exponential",
];

/// Non-lattice searches start at this height.
pub const IM_BOUND: f64 = 16.0;

#[derive(Clone, Debug)]
pub struct Instance {
    pub model: DistributionModel,
    pub r0: f64,
    /// Unit-square samples turned into evaluation points by `point`.
    pub probes: Vec<(f64, f64)>,
    pub split: f64,
}

impl Instance {
    /// A point inside the strip where `g` is analytic (or meromorphic with
    /// its poles to the right of `r0`).
    pub fn point(&self, u: f64, v: f64) -> C {
        let hi = self.model.moments().mgf_radius.min(self.r0).min(4.0);
        let im = if self.model.is_lattice() { std::f64::consts::PI } else { 12.0 };
        c(-1.0 + u * (hi - 0.05 + 1.0), (2.0 * v - 1.0) * im)
    }
}

fn probes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 4)
}

fn weights(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, n).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    })
}

fn wrap(model: impl Strategy<Value = DistributionModel> + 'static, r0: std::ops::Range<f64>) -> BoxedStrategy<Instance> {
    (model, r0, probes(), 0.3..0.7f64)
        .prop_map(|(model, r0, probes, split)| Instance { model, r0, probes, split })
        .boxed()
}

/// Random instances of one family, with an `r0` inside the region where the
/// root set is finite.
pub fn family(name: &str) -> BoxedStrategy<Instance> {
    match name {
        "discrete_pmf" => wrap(
            (weights(2..=6), 0.0..0.6f64).prop_map(|(w, p0)| {
                let mut pmf: Vec<f64> = w.iter().map(|v| v * (1.0 - p0)).collect();
                pmf.insert(0, p0);
                DistributionModel::discrete_pmf(pmf).unwrap()
            }),
            0.5..3.0,
        ),
        "negative_binomial" => wrap(
            (0.05..0.9f64, 1u32..5).prop_map(|(p, n)| DistributionModel::negative_binomial(p, n).unwrap()),
            0.5..3.0,
        ),
        "geometric" => wrap((0.05..0.99f64).prop_map(|p| DistributionModel::geometric(p).unwrap()), 0.5..3.0),
        "exponential" => wrap((0.1..10.0f64).prop_map(|r| DistributionModel::exponential(r).unwrap()), 0.5..12.0),
        "erlang" => wrap(
            (1u32..5, 0.2..5.0f64).prop_map(|(k, r)| DistributionModel::erlang(k, r).unwrap()),
            0.5..8.0,
        ),
        "hyperexponential" => wrap(
            (weights(2..=3), prop::collection::vec(0.2..5.0f64, 3)).prop_map(|(p, rates)| {
                let n = p.len();
                DistributionModel::hyperexponential(p, rates[..n].to_vec()).unwrap()
            }),
            0.5..6.0,
        ),
        "matrix_exponential" => wrap(
            (1usize..=3).prop_flat_map(|n| {
                (weights(n..=n), prop::collection::vec(0.0..2.0f64, n * n), prop::collection::vec(0.2..2.0f64, n))
                    .prop_map(move |(alpha, off, exit)| {
                        let mut t = vec![vec![0.0; n]; n];
                        for i in 0..n {
                            let mut out = exit[i];
                            for j in 0..n {
                                if i != j {
                                    t[i][j] = off[i * n + j];
                                    out += off[i * n + j];
                                }
                            }
                            t[i][i] = -out;
                        }
                        DistributionModel::matrix_exponential(alpha, t).unwrap()
                    })
            }),
            0.5..6.0,
        ),
        "uniform01" => wrap(Just(DistributionModel::uniform01()), 0.5..4.0),
        "truncated_exponential" => (0.3..3.0f64, 0.5..3.0f64, 0.1..0.9f64, probes(), 0.3..0.7f64)
            .prop_map(|(rate, d, frac, probes, split)| Instance {
                model: DistributionModel::truncated_exponential(rate, d).unwrap(),
                // roots sit on Re z = rate, infinitely many of them
                r0: frac * rate,
                probes,
                split,
            })
            .boxed(),
        other => panic!("unknown family {other}"),
    }
}

/// `n` deterministic draws from a family.
pub fn draws(name: &str, n: usize, seed: u8) -> Vec<Instance> {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]));
    let strat = family(name);
    (0..n).map(|_| strat.new_tree(&mut runner).unwrap().current()).collect()
}

pub fn region(inst: &Instance) -> SearchRegion {
    let r = SearchRegion::for_model(&inst.model, inst.r0);
    if inst.model.is_lattice() {
        r
    } else {
        r.with_im_bound(IM_BOUND)
    }
}

pub fn roots(inst: &Instance) -> Result<RootSet, String> {
    find_roots(&inst.model, &region(inst)).map_err(|e| format!("find_roots: {e}"))
}

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Roots closed under conjugation, `g(conj z) = conj g(z)`, and conjugate
/// roots carrying conjugate residues.
pub fn conjugate_symmetry(inst: &Instance, set: &RootSet) -> Result<(), String> {
    let m = &inst.model;
    for &(u, v) in &inst.probes {
        let z = inst.point(u, v);
        let (a, b) = (m.mgf(z.conj()).map_err(|e| e.to_string())?, m.mgf(z).map_err(|e| e.to_string())?);
        if !close(a, b.conj(), 1e-13) {
            return Err(format!("mgf not conjugate-symmetric at {z}: {a} vs {b}"));
        }
    }
    let lattice = m.is_lattice();
    for r in &set.roots {
        let z = r.location;
        // on a lattice Im = π is its own conjugate modulo 2πi
        let self_conj = z.im == 0.0 || (lattice && (z.im.abs() - std::f64::consts::PI).abs() < 1e-12);
        if self_conj {
            continue;
        }
        let Some(partner) = set.roots.iter().find(|s| close(s.location, z.conj(), 1e-10)) else {
            return Err(format!("root {z} has no conjugate"));
        };
        if r.multiplicity != 1 || partner.multiplicity != 1 {
            continue;
        }
        let kind = kind_of(m);
        let a = residue_simple(r, kind, m).map_err(|e| e.to_string())?;
        let b = residue_simple(partner, kind, m).map_err(|e| e.to_string())?;
        if !close(a, b.conj(), 1e-10) {
            return Err(format!("residues at {z} and its conjugate: {a} vs {b}"));
        }
    }
    Ok(())
}

pub fn kind_of(m: &DistributionModel) -> IntegrandKind {
    if m.is_lattice() {
        IntegrandKind::Mass
    } else {
        IntegrandKind::Density
    }
}

/// Every evaluation of the full residue sum is real: the imaginary parts of
/// the terms cancel to rounding.
pub fn real_valued(inst: &Instance) -> Result<(), String> {
    let m = &inst.model;
    let e = if m.is_lattice() { expand_mass(m, inst.r0) } else { expand_density(m, inst.r0) }
        .map_err(|e| format!("expansion: {e}"))?;
    let xs: Vec<f64> = if m.is_lattice() { vec![1.0, 2.0, 5.0, 10.0] } else { vec![0.25, 1.0, 2.5, 6.0] };
    for x in xs {
        let parts: Vec<C> = e.terms.iter().map(|t| t.eval(x)).collect();
        let sum: C = parts.iter().sum();
        let scale: f64 = parts.iter().map(|p| p.norm()).sum::<f64>().max(1e-300);
        if sum.im.abs() > 1e-12 * scale.max(1.0) {
            return Err(format!("imaginary part {} at x={x}", sum.im));
        }
        let v = e.value(x);
        if !v.is_finite() {
            return Err(format!("non-finite value at x={x}"));
        }
    }
    Ok(())
}

/// Closed-form and contour-integral residues agree on every simple root.
pub fn simple_matches_numeric(inst: &Instance, set: &RootSet) -> Result<(), String> {
    let m = &inst.model;
    let kind = kind_of(m);
    let x = 0.75;
    for (i, r) in set.roots.iter().enumerate() {
        if r.multiplicity != 1 {
            continue;
        }
        let hint = set
            .roots
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, s)| 0.5 * (s.location - r.location).norm())
            .fold(f64::INFINITY, f64::min);
        let hint = hint.is_finite().then_some(hint);
        let simple = residue_simple(r, kind, m).map_err(|e| format!("residue_simple at {}: {e}", r.location))?;
        let expected = simple * (-(r.location + kind.shift()) * x).exp();
        let numeric =
            residue_numeric(m, r.location, kind, x, hint).map_err(|e| format!("residue_numeric at {}: {e}", r.location))?;
        if !close(numeric, expected, 1e-9) {
            return Err(format!("residue at {}: simple {expected} vs numeric {numeric}", r.location));
        }
    }
    Ok(())
}

/// The zero count of a rectangle equals the sum over both halves of a
/// vertical and of a horizontal split, and matches the returned roots.
pub fn count_consistent(inst: &Instance, set: &RootSet) -> Result<(), String> {
    let m = &inst.model;
    let top = if m.is_lattice() { std::f64::consts::PI + 0.0123456789 } else { set.im_bound };
    let rect = Rect::new(-0.2531415926, set.r0, -0.0123456789, top);
    let count = |r: Rect| count_zeros(m, r).map_err(|e| format!("count_zeros {r:?}: {e}"));
    let n = count(rect)?;
    let listed: u32 = set.roots.iter().filter(|r| r.location.im >= 0.0).map(|r| r.multiplicity).sum();
    if n != listed {
        return Err(format!("count {n} but {listed} roots listed in the upper half"));
    }
    let xs = rect.re_lo + inst.split * (rect.re_hi - rect.re_lo);
    let ys = rect.im_lo + inst.split * (rect.im_hi - rect.im_lo);
    let v = count(Rect::new(rect.re_lo, xs, rect.im_lo, rect.im_hi))? + count(Rect::new(xs, rect.re_hi, rect.im_lo, rect.im_hi))?;
    let h = count(Rect::new(rect.re_lo, rect.re_hi, rect.im_lo, ys))? + count(Rect::new(rect.re_lo, rect.re_hi, ys, rect.im_hi))?;
    if v != n || h != n {
        return Err(format!("count {n}, vertical split {v}, horizontal split {h}"));
    }
    Ok(())
}

/// The four checks above for one instance.
pub fn check_instance(inst: &Instance) -> Result<(), String> {
    let set = roots(inst)?;
    conjugate_symmetry(inst, &set)?;
    real_valued(inst)?;
    simple_matches_numeric(inst, &set)?;
    count_consistent(inst, &set)
}
