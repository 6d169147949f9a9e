//! Residues of the expansion integrands at the zeros of `g - 1`.
//!
//! Every term has the shape `e^{-x s_j} Σ_k p_k x^k`, where `s_j` is the
//! root (renewal kinds) or the root shifted by `κ` (ruin kinds). Simple
//! roots get closed-form coefficients; multiple roots, and roots where an
//! extra factor of the integrand vanishes, are handled by trapezoid sums on
//! small circles.

use crate::cmath::{expm1, factorial, re, C};
use crate::error::{Error, Result};
use crate::models::{DistributionModel, Family};
use crate::rootfinder::Root;
use serde::Serialize;
use std::f64::consts::PI;

/// Which expansion a residue belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum IntegrandKind {
    /// `e^{-xz} / (z (1 - g))`
    NonlatticeV,
    /// `e^{-kz} / ((e^z - 1)(1 - g))`
    LatticeV,
    /// `e^{-xz} / (g - 1)`
    Density,
    /// `e^{-kz} / (g - 1)`
    Mass,
    /// `(αm - c) e^{-x(z+κ)} / (c (1 - g)(z + κ))`
    RuinContinuous { kappa: f64, alpha: f64, premium: f64, claims_mean: f64 },
    /// `-e^{z+κ}(m - g) e^{-x(z+κ)} / ((1 - e^{z+κ})(1 - g))`
    RuinDiscrete { kappa: f64, claims_mean: f64 },
}

impl IntegrandKind {
    /// Shift between the root and the decay exponent.
    pub fn shift(&self) -> f64 {
        match self {
            IntegrandKind::RuinContinuous { kappa, .. } | IntegrandKind::RuinDiscrete { kappa, .. } => *kappa,
            _ => 0.0,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            IntegrandKind::NonlatticeV => "nonlattice_v",
            IntegrandKind::LatticeV => "lattice_v",
            IntegrandKind::Density => "density",
            IntegrandKind::Mass => "mass",
            IntegrandKind::RuinContinuous { .. } => "ruin_continuous",
            IntegrandKind::RuinDiscrete { .. } => "ruin_discrete",
        }
    }

    /// Integrand without its exponential factor `e^{-x s}`.
    fn prefactor(&self, model: &DistributionModel, z: C) -> Result<C> {
        let g = model.mgf(z)?;
        let one_minus_g = re(1.0) - g;
        Ok(match *self {
            IntegrandKind::NonlatticeV => (z * one_minus_g).inv(),
            IntegrandKind::LatticeV => (expm1(z) * one_minus_g).inv(),
            IntegrandKind::Density | IntegrandKind::Mass => -one_minus_g.inv(),
            IntegrandKind::RuinContinuous { kappa, alpha, premium, claims_mean } => {
                re(alpha * claims_mean - premium) / ((z + kappa) * one_minus_g * premium)
            }
            IntegrandKind::RuinDiscrete { kappa, claims_mean } => {
                let w = z + kappa;
                -(w.exp() * (re(claims_mean) - g)) / (-expm1(w) * one_minus_g)
            }
        })
    }

    /// Singular points of the prefactor other than zeros of `g - 1`.
    fn extra_singularities(&self, near: C) -> Vec<C> {
        let lattice_points = |shift: f64| -> Vec<C> {
            let k = (near.im / (2.0 * PI)).round();
            (-1..=1).map(|d| C::new(-shift, 2.0 * PI * (k + d as f64))).collect()
        };
        match *self {
            IntegrandKind::NonlatticeV => vec![re(0.0)],
            IntegrandKind::LatticeV => lattice_points(0.0),
            IntegrandKind::Density | IntegrandKind::Mass => Vec::new(),
            IntegrandKind::RuinContinuous { kappa, .. } => vec![re(-kappa)],
            IntegrandKind::RuinDiscrete { kappa, .. } => lattice_points(kappa),
        }
    }
}

impl std::fmt::Display for IntegrandKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One expansion term `e^{-x·exponent} Σ_k coeffs[k] x^k`.
#[derive(Clone, Debug, Serialize)]
pub struct ResidueTerm {
    pub root: Root,
    pub kind: IntegrandKind,
    pub exponent: C,
    pub coeffs: Vec<C>,
}

impl ResidueTerm {
    pub fn eval(&self, x: f64) -> C {
        let poly = self.coeffs.iter().rev().fold(re(0.0), |acc, p| acc * x + p);
        (-self.exponent * x).exp() * poly
    }

    pub fn is_simple(&self) -> bool {
        self.coeffs.len() == 1
    }
}

/// Closed-form coefficient at a simple root.
pub fn residue_simple(root: &Root, kind: IntegrandKind, model: &DistributionModel) -> Result<C> {
    if root.multiplicity != 1 {
        return Err(Error::NotSimple { at: root.location, multiplicity: root.multiplicity });
    }
    let z = root.location;
    let gp = root.g_prime;
    if gp.norm() == 0.0 {
        return Err(Error::NotSimple { at: z, multiplicity: 2 });
    }
    let degenerate = |f: C| f.norm() < 1e-12;
    match kind {
        IntegrandKind::NonlatticeV => {
            if degenerate(z) {
                return Err(Error::DegenerateFactor { at: z });
            }
            Ok(-(z * gp).inv())
        }
        IntegrandKind::LatticeV => {
            let e = expm1(z);
            if degenerate(e) {
                return Err(Error::DegenerateFactor { at: z });
            }
            Ok(-(e * gp).inv())
        }
        IntegrandKind::Density | IntegrandKind::Mass => Ok(gp.inv()),
        IntegrandKind::RuinContinuous { kappa, alpha, premium, claims_mean } => {
            let s = z + kappa;
            if degenerate(s) {
                return Err(Error::DegenerateFactor { at: z });
            }
            match model.family() {
                Family::LadderContinuous(l) => {
                    let mp = l.claims.mgf_derivative(s, 1)?;
                    let num = premium - alpha * claims_mean;
                    if s.im == 0.0 {
                        Ok(re(num / (alpha * mp.re - premium)))
                    } else {
                        Ok(re(num) / (mp * alpha - premium))
                    }
                }
                // identity α M'(s) - c = c s g'(z) at a root
                _ => Ok(re(premium - alpha * claims_mean) / (s * gp * premium)),
            }
        }
        IntegrandKind::RuinDiscrete { kappa, claims_mean } => {
            let w = z + kappa;
            if degenerate(expm1(w)) {
                return Err(Error::DegenerateFactor { at: z });
            }
            match model.family() {
                Family::LadderDiscrete(l) => {
                    let mp = l.claims.mgf_derivative(w, 1)?;
                    if w.im == 0.0 {
                        let ew = w.re.exp();
                        Ok(re((claims_mean - 1.0) * ew / (ew - mp.re)))
                    } else {
                        let ew = w.exp();
                        Ok(ew * (claims_mean - 1.0) / (ew - mp))
                    }
                }
                // identity e^w - M'(w) = (1 - e^w) g'(z) at a root
                _ => {
                    let ew = w.exp();
                    Ok(ew * (claims_mean - 1.0) / (-expm1(w) * gp))
                }
            }
        }
    }
}

/// Isolation radius around `pole`: `min(hint, half the distance to the
/// nearest known singularity, 0.1)`.
fn isolation_radius(model: &DistributionModel, pole: C, kind: IntegrandKind, hint: Option<f64>) -> Result<f64> {
    let mut d = model.nearest_pole_distance(pole);
    for s in kind.extra_singularities(pole) {
        let dist = (s - pole).norm();
        if dist > 1e-12 {
            d = d.min(dist);
        }
    }
    let radius = hint.unwrap_or(f64::INFINITY).min(0.5 * d).min(0.1);
    if !(radius > 1e-8) {
        return Err(Error::PoleTooClose { at: pole, distance: d });
    }
    Ok(radius)
}

/// `Res[e^{-x s(z)} H(z); pole]` of the full integrand by an `N`-node
/// trapezoid rule on a circle, `N` doubling from 64 until successive values
/// agree to `1e-10` relative.
pub fn residue_numeric(
    model: &DistributionModel,
    pole: C,
    kind: IntegrandKind,
    x: f64,
    radius_hint: Option<f64>,
) -> Result<C> {
    let radius = isolation_radius(model, pole, kind, radius_hint)?;
    let shift = kind.shift();
    let f = |z: C| -> Result<C> { Ok(kind.prefactor(model, z)? * (-(z + shift) * x).exp()) };
    let sums = circle_moments(f, pole, radius, 1)?;
    Ok(sums[0])
}

/// Trapezoid approximations of `(1/2πi) ∮ F(z) (z - center)^k dz`,
/// `k = 0..count`, refined by node doubling.
fn circle_moments<F>(f: F, center: C, radius: f64, count: usize) -> Result<Vec<C>>
where
    F: Fn(C) -> Result<C>,
{
    let mut prev: Option<Vec<C>> = None;
    let mut n = 64usize;
    let mut change = f64::INFINITY;
    while n <= 4096 {
        let mut sums = vec![re(0.0); count];
        let mut magnitude = 0.0f64;
        for j in 0..n {
            let w = C::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / n as f64);
            let v = f(center + w)?;
            let mut wk = w;
            for s in sums.iter_mut() {
                *s += v * wk;
                wk *= w;
            }
            magnitude = magnitude.max((v * w).norm());
        }
        for s in sums.iter_mut() {
            *s /= n as f64;
        }
        if let Some(p) = &prev {
            let scale = sums
                .iter()
                .map(|s| s.norm())
                .fold(1e-14 * magnitude, f64::max);
            change = sums.iter().zip(p).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
            if change <= 1e-10 {
                return Ok(sums);
            }
        }
        prev = Some(sums);
        n *= 2;
    }
    Err(Error::NoConvergence { change })
}

/// Polynomial coefficients `p_k` with `Res[e^{-x s(z)} H(z); z_j] =
/// e^{-x s_j} Σ_k p_k x^k`, valid for all `x` at once.
fn laurent_polynomial(
    model: &DistributionModel,
    root: &Root,
    kind: IntegrandKind,
    radius_hint: Option<f64>,
) -> Result<Vec<C>> {
    let z0 = root.location;
    let radius = isolation_radius(model, z0, kind, radius_hint)?;
    // pole order of H: multiplicity, plus one if an extra factor vanishes here
    let extra = kind.extra_singularities(z0).iter().any(|s| (s - z0).norm() < 1e-9) as usize;
    let order = root.multiplicity as usize + extra;
    let a = circle_moments(|z| kind.prefactor(model, z), z0, radius, order)?;
    // a[k] = a_{-1-k} (Laurent coefficients of H at z0)
    let mut p: Vec<C> = a
        .iter()
        .enumerate()
        .map(|(k, ak)| ak * ((-1f64).powi(k as i32) / factorial(k as u32) * radius.powi(0)))
        .collect();
    let top = p.iter().map(|v| v.norm()).fold(0.0, f64::max);
    while p.len() > 1 && p.last().unwrap().norm() < 1e-12 * top {
        p.pop();
    }
    Ok(p)
}

/// Expansion term at `root`; `radius_hint` should be at most half the
/// distance to the nearest other root.
pub fn residue_term(
    model: &DistributionModel,
    root: &Root,
    kind: IntegrandKind,
    radius_hint: Option<f64>,
) -> Result<ResidueTerm> {
    let exponent = root.location + kind.shift();
    let coeffs = match residue_simple(root, kind, model) {
        Ok(cj) => vec![cj],
        Err(Error::NotSimple { .. }) | Err(Error::DegenerateFactor { .. }) => {
            laurent_polynomial(model, root, kind, radius_hint)?
        }
        Err(e) => return Err(e),
    };
    Ok(ResidueTerm { root: root.clone(), kind, exponent, coeffs })
}

/// Half the distance from `roots[i]` to its nearest neighbour.
pub(crate) fn neighbour_hint(roots: &[Root], i: usize) -> Option<f64> {
    let z = roots[i].location;
    let d = roots
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, r)| (r.location - z).norm())
        .fold(f64::INFINITY, f64::min);
    if d.is_finite() {
        Some(0.5 * d)
    } else {
        None
    }
}
