//! Multi-term ruin-probability expansions for the compound Poisson model,
//! the binomial (discrete-time) model, and the two-term asymptotics of the
//! probability that at least one of two companies is ruined.

use crate::cmath::{re, C};
use crate::error::{Error, Result};
use crate::expansion::{assemble_terms, paired_contributions};
use crate::models::{tilt_ladder_continuous, tilt_ladder_discrete, DistributionModel};
use crate::residue::{IntegrandKind, ResidueTerm};
use crate::rootfinder::{find_roots, lundberg_root_continuous, lundberg_root_discrete, RootSet, SearchRegion};
use serde::Serialize;

/// Compound Poisson risk process `x + c t - Σ_{i ≤ N_t} Z_i`.
#[derive(Clone, Debug)]
pub struct ContinuousRiskModel {
    pub claims: DistributionModel,
    pub alpha: f64,
    pub premium: f64,
    pub kappa: f64,
    /// Tilted ladder-height law.
    pub ladder: DistributionModel,
}

impl ContinuousRiskModel {
    pub fn new(claims: DistributionModel, alpha: f64, premium: f64) -> Result<Self> {
        let kappa = lundberg_root_continuous(&claims, alpha, premium)?;
        let ladder = tilt_ladder_continuous(&claims, alpha, premium, kappa)?;
        Ok(Self { claims, alpha, premium, kappa, ladder })
    }

    pub fn claims_mean(&self) -> f64 {
        self.claims.moments().mu
    }

    pub fn loading(&self) -> f64 {
        self.premium - self.alpha * self.claims_mean()
    }

    fn kind(&self) -> IntegrandKind {
        IntegrandKind::RuinContinuous {
            kappa: self.kappa,
            alpha: self.alpha,
            premium: self.premium,
            claims_mean: self.claims_mean(),
        }
    }
}

/// Binomial risk model `x + n - Σ_{j ≤ n} Z_j` with integer claims.
#[derive(Clone, Debug)]
pub struct DiscreteRiskModel {
    pub claims: DistributionModel,
    /// `None` when claims never exceed one unit, so ruin from `x ≥ 1` is impossible.
    pub kappa: Option<f64>,
    pub ladder: Option<DistributionModel>,
}

impl DiscreteRiskModel {
    pub fn new(claims: DistributionModel) -> Result<Self> {
        match lundberg_root_discrete(&claims) {
            Ok(kappa) => {
                let ladder = tilt_ladder_discrete(&claims, kappa)?;
                Ok(Self { claims, kappa: Some(kappa), ladder: Some(ladder) })
            }
            Err(Error::NoFiniteRoot(_)) => Ok(Self { claims, kappa: None, ladder: None }),
            Err(e) => Err(e),
        }
    }

    pub fn claims_mean(&self) -> f64 {
        self.claims.moments().mu
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuinDiagnostics {
    /// The leading constant with the alternative denominator `E[Z e^{κZ}] - c`
    /// (continuous model only); kept for comparison.
    pub constant_without_alpha: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuinExpansion {
    /// Terms `e^{-x(z_j + κ)} Σ p_k x^k`; term 0 is the Cramér–Lundberg pair.
    pub terms: Vec<ResidueTerm>,
    pub kappa: Option<f64>,
    /// `r + κ`: the omitted remainder is `o(e^{-(r+κ)x})`.
    pub remainder_exponent: f64,
    pub lattice: bool,
    pub roots: Option<RootSet>,
    pub diagnostics: RuinDiagnostics,
}

impl RuinExpansion {
    pub fn evaluate(&self, x: f64) -> f64 {
        paired_contributions(&self.terms, x).iter().sum()
    }

    /// Per-root (or per-pair) contributions at `x`.
    pub fn breakdown(&self, x: f64) -> Vec<f64> {
        paired_contributions(&self.terms, x)
    }

    /// Expansion truncated to its first `n` real contributions (a
    /// conjugate pair counts as one).
    pub fn leading_at(&self, n: usize, x: f64) -> f64 {
        paired_contributions(&self.terms, x).iter().take(n).sum()
    }
}

/// `ψ(x) = Σ_j Res[(αm - c) e^{-x(z+κ)} / (c (1 - g(z))(z + κ)); z_j]`
/// over the roots of the ladder transform with `Re z < r`.
pub fn ruin_continuous(model: &ContinuousRiskModel, r: f64) -> Result<RuinExpansion> {
    let roots = find_roots(&model.ladder, &SearchRegion::for_model(&model.ladder, r))?;
    let terms = assemble_terms(&model.ladder, &roots.roots, model.kind(), true)?;
    let m1 = model.claims.mgf_derivative(re(model.kappa), 1)?.re;
    let alt = model.loading() / (m1 - model.premium);
    Ok(RuinExpansion {
        terms,
        kappa: Some(model.kappa),
        remainder_exponent: roots.r0 + model.kappa,
        lattice: false,
        roots: Some(roots),
        diagnostics: RuinDiagnostics { constant_without_alpha: Some(alt) },
    })
}

/// Discrete analogue over the fundamental domain `|Im z| ≤ π`.
pub fn ruin_discrete(model: &DiscreteRiskModel, r: f64) -> Result<RuinExpansion> {
    let (Some(kappa), Some(ladder)) = (model.kappa, &model.ladder) else {
        return Ok(RuinExpansion {
            terms: Vec::new(),
            kappa: None,
            remainder_exponent: f64::INFINITY,
            lattice: true,
            roots: None,
            diagnostics: RuinDiagnostics { constant_without_alpha: None },
        });
    };
    let roots = find_roots(ladder, &SearchRegion::for_model(ladder, r))?;
    let kind = IntegrandKind::RuinDiscrete { kappa, claims_mean: model.claims_mean() };
    let terms = assemble_terms(ladder, &roots.roots, kind, true)?;
    Ok(RuinExpansion {
        terms,
        kappa: Some(kappa),
        remainder_exponent: roots.r0 + kappa,
        lattice: true,
        roots: Some(roots),
        diagnostics: RuinDiagnostics { constant_without_alpha: None },
    })
}

/// `C = (c - αm) / (α E[Z e^{κZ}] - c)`.
pub fn cramer_lundberg_constant(model: &ContinuousRiskModel) -> Result<f64> {
    let mp = model.claims.mgf_derivative(re(model.kappa), 1)?;
    let num = model.premium - model.alpha * model.claims_mean();
    Ok(num / (model.alpha * mp.re - model.premium))
}

/// Leading constant of the discrete model, `(m - 1) e^κ / (e^κ - E[Z e^{κZ}])`.
pub fn discrete_lundberg_constant(model: &DiscreteRiskModel) -> Result<Option<f64>> {
    let Some(kappa) = model.kappa else { return Ok(None) };
    let mp = model.claims.mgf_derivative(re(kappa), 1)?;
    let ek = kappa.exp();
    Ok(Some((model.claims_mean() - 1.0) * ek / (ek - mp.re)))
}

/// Leading two exponential orders of one marginal ruin probability.
#[derive(Clone, Debug, Serialize)]
pub struct TwoTermData {
    pub kappa: f64,
    pub c0: f64,
    /// First root after the origin, if any was found.
    pub z1: Option<C>,
    /// Total coefficient of the first oscillating order (twice the root
    /// coefficient for a conjugate pair).
    pub c1: Option<C>,
}

impl TwoTermData {
    pub fn of(model: &ContinuousRiskModel) -> Result<Self> {
        let c0 = cramer_lundberg_constant(model)?;
        let mut r = 2.0;
        while r <= 64.0 {
            let exp = ruin_continuous(model, r)?;
            if let Some(t) = exp.terms.get(1) {
                if !t.is_simple() {
                    return Err(Error::NotSimple { at: t.root.location, multiplicity: t.root.multiplicity });
                }
                let factor = if t.root.conjugate_of.is_some() { 2.0 } else { 1.0 };
                return Ok(Self { kappa: model.kappa, c0, z1: Some(t.root.location), c1: Some(t.coeffs[0] * factor) });
            }
            r *= 2.0;
        }
        Ok(Self { kappa: model.kappa, c0, z1: None, c1: None })
    }
}

/// Which pair of candidate orders dominates `ψ_or(x, qx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `κ1` then the first oscillating order of company 1.
    FirstThenFirstOscillation,
    /// `κ1` then `qκ2`.
    FirstThenSecond,
    /// `qκ2` then `κ1`.
    SecondThenFirst,
    /// `qκ2` then the first oscillating order of company 2.
    SecondThenSecondOscillation,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        f.write_str(s.as_str().unwrap())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Candidate {
    First,
    Second,
    FirstOscillation,
    SecondOscillation,
}

#[derive(Clone, Debug, Serialize)]
pub struct BivariateResult {
    pub q: f64,
    pub region: Region,
    pub d0: f64,
    pub big_d0: f64,
    pub d1: C,
    pub big_d1: C,
    /// Two candidate exponents tie within `1e-10`; `alternative` holds the
    /// other ordering.
    pub degenerate: bool,
    pub alternative: Option<Region>,
}

impl BivariateResult {
    /// `D0 e^{-d0 x} + Re[D1 e^{-d1 x}]`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.big_d0 * (-self.d0 * x).exp() + (self.big_d1 * (-self.d1 * x).exp()).re
    }
}

/// Two companies with capitals `x` and `q x`.
#[derive(Clone, Debug)]
pub struct BivariateModel {
    pub first: ContinuousRiskModel,
    pub second: ContinuousRiskModel,
    pub first_terms: TwoTermData,
    pub second_terms: TwoTermData,
}

impl BivariateModel {
    pub fn new(first: ContinuousRiskModel, second: ContinuousRiskModel) -> Result<Self> {
        let first_terms = TwoTermData::of(&first)?;
        let second_terms = TwoTermData::of(&second)?;
        Ok(Self { first, second, first_terms, second_terms })
    }

    /// Insurer keeps `min(V, d)`; the reinsurer pays `V - d` on the claims
    /// exceeding `d`, which are again `Exp(λ)` and arrive at rate `α e^{-λd}`.
    pub fn stop_loss(lambda: f64, d: f64, alpha: f64, c1: f64, c2: f64) -> Result<Self> {
        let first = ContinuousRiskModel::new(DistributionModel::truncated_exponential(lambda, d)?, alpha, c1)?;
        let second = ContinuousRiskModel::new(DistributionModel::exponential(lambda)?, alpha * (-lambda * d).exp(), c2)?;
        Self::new(first, second)
    }
}

const TIE: f64 = 1e-10;

/// Two-term asymptotics of `ψ_or(x, qx)` in direction `q`.
pub fn ruin_bivariate(model: &BivariateModel, q: f64) -> Result<BivariateResult> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidModel(format!("direction ratio q must be positive, got {q}")));
    }
    let a = &model.first_terms;
    let b = &model.second_terms;
    let mut cands: Vec<(Candidate, C, C)> = vec![
        (Candidate::First, re(a.kappa), re(a.c0)),
        (Candidate::Second, re(q * b.kappa), re(b.c0)),
    ];
    if let (Some(z), Some(c1)) = (a.z1, a.c1) {
        cands.push((Candidate::FirstOscillation, z + a.kappa, c1));
    }
    if let (Some(z), Some(c1)) = (b.z1, b.c1) {
        if c1.norm() > 0.0 {
            cands.push((Candidate::SecondOscillation, (z + b.kappa) * q, c1));
        }
    }
    cands.sort_by(|x, y| x.1.re.partial_cmp(&y.1.re).unwrap());
    let region_of = |p: Candidate, s: Candidate| -> Option<Region> {
        use Candidate::*;
        match (p, s) {
            (First, FirstOscillation) => Some(Region::FirstThenFirstOscillation),
            (First, Second) => Some(Region::FirstThenSecond),
            (Second, First) => Some(Region::SecondThenFirst),
            (Second, SecondOscillation) => Some(Region::SecondThenSecondOscillation),
            _ => None,
        }
    };
    let (p, s) = (cands[0], cands[1]);
    let region = region_of(p.0, s.0).ok_or_else(|| Error::InvalidModel("oscillating order precedes its leading order".into()))?;
    // ties: between the two leading orders, or between the second and third
    let mut degenerate = false;
    let mut alternative = None;
    if (p.1.re - s.1.re).abs() < TIE {
        degenerate = true;
        alternative = region_of(s.0, p.0);
    } else if let Some(t) = cands.get(2) {
        if (s.1.re - t.1.re).abs() < TIE {
            degenerate = true;
            alternative = region_of(p.0, t.0);
        }
    }
    Ok(BivariateResult {
        q,
        region,
        d0: p.1.re,
        big_d0: p.2.re,
        d1: s.1,
        big_d1: s.2,
        degenerate,
        alternative,
    })
}
