//! Residue expansions of `v(x) = U(x) - x/μ - const`, of `U` itself and of
//! the renewal density (non-lattice) or mass function (lattice).

use crate::cmath::{c, re};
use crate::error::Result;
use crate::models::DistributionModel;
use crate::residue::{neighbour_hint, residue_term, IntegrandKind, ResidueTerm};
use crate::rootfinder::{count_zeros, find_roots, Rect, Root, RootSet, SearchRegion};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    V,
    U,
    Density,
    Mass,
}

impl std::str::FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "v" => Ok(Quantity::V),
            "U" | "u_cumulative" => Ok(Quantity::U),
            "density" => Ok(Quantity::Density),
            "mass" => Ok(Quantity::Mass),
            other => Err(format!("unknown quantity {other:?}; expected v, U, density or mass")),
        }
    }
}

/// `x/μ + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearPart {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearPart {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Expansion {
    pub quantity: Quantity,
    pub terms: Vec<ResidueTerm>,
    pub linear_part: LinearPart,
    /// `R0` actually used (after boundary nudges).
    pub remainder_abscissa: f64,
    pub lattice: bool,
    pub exact: bool,
    /// Mass functions only: the limit of `1/(1 - g(z))` as `Re z → +∞`,
    /// which the residues miss at `k = 0` (the right edge of the contour
    /// does not vanish there).
    pub origin_atom: f64,
    pub roots: RootSet,
}

/// Value of an expansion at one point with its per-pair breakdown.
#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub x: f64,
    pub value: f64,
    pub linear: f64,
    /// One real contribution per root or conjugate pair, in term order.
    pub contributions: Vec<f64>,
    /// `e^{-R0 x}`, the scale of the omitted remainder.
    pub remainder_scale: f64,
}

fn linear_part(model: &DistributionModel) -> LinearPart {
    let m = model.moments();
    let mu2 = if model.is_lattice() { m.mu2 + m.mu } else { m.mu2 };
    LinearPart { slope: 1.0 / m.mu, intercept: mu2 / (2.0 * m.mu * m.mu) }
}

fn build(model: &DistributionModel, r0: f64, quantity: Quantity) -> Result<Expansion> {
    let lattice = model.is_lattice();
    let roots = find_roots(model, &SearchRegion::for_model(model, r0))?;
    let kind = match (quantity, lattice) {
        (Quantity::V | Quantity::U, false) => IntegrandKind::NonlatticeV,
        (Quantity::V | Quantity::U, true) => IntegrandKind::LatticeV,
        (Quantity::Density, _) => IntegrandKind::Density,
        (Quantity::Mass, _) => IntegrandKind::Mass,
    };
    let include_origin = matches!(quantity, Quantity::Density | Quantity::Mass);
    let terms = assemble_terms(model, &roots.roots, kind, include_origin)?;
    let linear_part = match quantity {
        Quantity::Density | Quantity::Mass => LinearPart { slope: 0.0, intercept: 0.0 },
        _ => linear_part(model),
    };
    let mut exp = Expansion {
        quantity,
        terms,
        linear_part,
        remainder_abscissa: roots.r0,
        lattice,
        exact: false,
        origin_atom: if quantity == Quantity::Mass { origin_atom(model) } else { 0.0 },
        roots,
    };
    exp.exact = exact_mode_check(model, &exp).exact;
    Ok(exp)
}

/// Mean of `1/(1 - g(R + iθ))` over a period at large `R`.
fn origin_atom(model: &DistributionModel) -> f64 {
    let n = 256;
    let far = 60.0;
    let mut sum = 0.0;
    for j in 0..n {
        let th = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let v = match model.mgf(c(far, th)) {
            Ok(g) => (re(1.0) - g).inv(),
            Err(_) => return f64::NAN,
        };
        sum += if v.re.is_finite() { v.re } else { 0.0 };
    }
    let v = sum / n as f64;
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

/// Residue terms for every root (the origin optional), with conjugate links
/// rewritten to index into the returned list.
pub(crate) fn assemble_terms(
    model: &DistributionModel,
    roots: &[Root],
    kind: IntegrandKind,
    include_origin: bool,
) -> Result<Vec<ResidueTerm>> {
    let keep: Vec<usize> = (0..roots.len())
        .filter(|&i| include_origin || roots[i].location != re(0.0))
        .collect();
    let mut terms = Vec::with_capacity(keep.len());
    for &i in &keep {
        let mut t = residue_term(model, &roots[i], kind, neighbour_hint(roots, i))?;
        t.root.conjugate_of = roots[i]
            .conjugate_of
            .and_then(|j| keep.iter().position(|&k| k == j));
        terms.push(t);
    }
    // make paired coefficients exact conjugates
    for i in 0..terms.len() {
        if let Some(j) = terms[i].root.conjugate_of {
            if j > i {
                let conj: Vec<_> = terms[i].coeffs.iter().map(|v| v.conj()).collect();
                terms[j].coeffs = conj;
                terms[j].exponent = terms[i].exponent.conj();
            }
        }
    }
    Ok(terms)
}

/// Sum of real per-pair contributions of `terms` at `x`.
pub(crate) fn paired_contributions(terms: &[ResidueTerm], x: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        match t.root.conjugate_of {
            Some(j) if j < i => continue,
            Some(_) => out.push(2.0 * t.eval(x).re),
            None => out.push(t.eval(x).re),
        }
    }
    out
}

/// Expansion of `v` in decaying exponentials, roots with `Re z < r0`.
pub fn expand_v(model: &DistributionModel, r0: f64) -> Result<Expansion> {
    build(model, r0, Quantity::V)
}

/// `U(x) = x/μ + intercept + v(x)`.
#[allow(non_snake_case)]
pub fn expand_U(model: &DistributionModel, r0: f64) -> Result<Expansion> {
    build(model, r0, Quantity::U)
}

/// Renewal density of a non-lattice law; the origin contributes `1/μ`.
pub fn expand_density(model: &DistributionModel, r0: f64) -> Result<Expansion> {
    if model.is_lattice() {
        return Err(crate::Error::InvalidModel("density expansion needs a non-lattice law; use mass".into()));
    }
    build(model, r0, Quantity::Density)
}

/// Renewal mass function `u(k)` of a lattice law.
pub fn expand_mass(model: &DistributionModel, r0: f64) -> Result<Expansion> {
    if !model.is_lattice() {
        return Err(crate::Error::InvalidModel("mass expansion needs a lattice law; use density".into()));
    }
    build(model, r0, Quantity::Mass)
}

pub fn expand(model: &DistributionModel, r0: f64, quantity: Quantity) -> Result<Expansion> {
    match quantity {
        Quantity::V => expand_v(model, r0),
        Quantity::U => expand_U(model, r0),
        Quantity::Density => expand_density(model, r0),
        Quantity::Mass => expand_mass(model, r0),
    }
}

impl Expansion {
    pub fn evaluate(&self, x: f64) -> Evaluation {
        let contributions = paired_contributions(&self.terms, x);
        let linear = if self.quantity == Quantity::U { self.linear_part.at(x) } else { 0.0 };
        let atom = if x == 0.0 { self.origin_atom } else { 0.0 };
        let value = linear + atom + contributions.iter().sum::<f64>();
        Evaluation { x, value, linear, contributions, remainder_scale: (-self.remainder_abscissa * x).exp() }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.evaluate(x).value
    }

    /// Number of per-pair contributions reported by `evaluate`.
    pub fn pair_count(&self) -> usize {
        self.terms
            .iter()
            .enumerate()
            .filter(|(i, t)| !matches!(t.root.conjugate_of, Some(j) if j < *i))
            .count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactReport {
    pub exact: bool,
    /// `(r, sup_θ |…|)` samples.
    pub samples: Vec<(f64, f64)>,
    pub reason: String,
}

/// Advisory check that the residue series over all roots is exact: the
/// sampled suprema of `|1/(e^r (1-g))|` (lattice) or `|1/(r (1-g))|`
/// (non-lattice) must decay monotonically along `r ∈ {10, 20, 40, 80}`, and
/// no root may lie beyond the expansion's abscissa.
pub fn exact_mode_check(model: &DistributionModel, expansion: &Expansion) -> ExactReport {
    let lattice = model.is_lattice();
    if !lattice && !model.is_rational() {
        return ExactReport {
            exact: false,
            samples: Vec::new(),
            reason: "transform is not rational; infinitely many roots are possible".into(),
        };
    }
    let rs = [10.0, 20.0, 40.0, 80.0];
    let mut samples = Vec::new();
    for &r in &rs {
        let n = 1024;
        let theta_max = if lattice { PI } else { 200.0 };
        let mut sup = 0.0f64;
        for j in 0..=n {
            let th = if lattice { -PI + 2.0 * PI * j as f64 / n as f64 } else { theta_max * j as f64 / n as f64 };
            let Ok(g) = model.mgf(c(r, th)) else { continue };
            let denom = if lattice { (re(1.0) - g) * r.exp() } else { (re(1.0) - g) * r };
            let v = denom.inv().norm();
            if v.is_finite() {
                sup = sup.max(v);
            } else if !v.is_nan() {
                sup = f64::INFINITY;
            }
        }
        samples.push((r, sup));
    }
    let monotone = samples.windows(2).all(|w| w[1].1 < w[0].1);
    let last = samples[3].1;
    let decays = last < 1e-3 || last / samples[0].1 < 0.2;
    if !(monotone && decays) {
        return ExactReport { exact: false, samples, reason: "sampled suprema do not decay".into() };
    }
    // every root must already be in the expansion
    let r0 = expansion.remainder_abscissa;
    let beyond = if lattice {
        count_zeros(model, Rect::new(r0, 80.0, -0.0123, PI + 0.0123))
    } else {
        let m = 2.0 * expansion.roots.im_bound.max(32.0);
        count_zeros(model, Rect::new(r0, 80.0, -m, m))
    };
    match beyond {
        Ok(0) => ExactReport { exact: true, samples, reason: "all roots included".into() },
        Ok(n) => ExactReport { exact: false, samples, reason: format!("{n} roots with Re z in ({r0}, 80]") },
        Err(e) => ExactReport { exact: false, samples, reason: format!("root count beyond r0 failed: {e}") },
    }
}
