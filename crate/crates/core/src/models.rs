//! Inter-renewal and claim-size laws with closed-form complex moment
//! generating functions, plus the exponentially tilted ladder-height laws
//! used by the ruin expansions.
//!
//! Every family's transform `g(z) = E[e^{zX}]` is coded in closed form on the
//! whole plane (meromorphic extensions included), so root finding and residue
//! evaluation can leave the strip of absolute convergence.

use crate::cmath::{c, cauchy_derivative, expm1, factorial, re, removable_patch, rising,
    uniform_moment_transform, C};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

const POLE_TOL: f64 = 1e-12;
const REMOVABLE_RADIUS: f64 = 1e-4;

/// Family tag, as it appears in model files and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    DiscretePmf,
    NegativeBinomial,
    Geometric,
    Exponential,
    Erlang,
    Hyperexponential,
    MatrixExponential,
    Uniform01,
    TruncatedExponential,
    LadderContinuous,
    LadderDiscrete,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned));
        f.write_str(s.as_deref().unwrap_or("?"))
    }
}

/// A pole of the meromorphic extension of `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub location: C,
    pub order: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mu: f64,
    pub mu2: f64,
    /// Abscissa of convergence `R` of the transform (may be infinite).
    pub mgf_radius: f64,
}

/// Matrix-exponential law `(alpha, T)`; `alpha` may carry an atom at zero.
#[derive(Clone, Debug)]
pub struct MatrixExponential {
    alpha: DVector<f64>,
    t: DMatrix<f64>,
    exit: DVector<f64>,
    ones: DVector<f64>,
    atom: f64,
    // Poles of alpha (-zI - T)^{-1} s and of alpha (-zI - T)^{-1} e, with orders.
    poles: Vec<Pole>,
    tail_poles: Vec<Pole>,
}

impl MatrixExponential {
    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }
    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }
    pub fn exit(&self) -> &DVector<f64> {
        &self.exit
    }
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `alpha (-zI - T)^{-power} rhs`.
    fn resolvent_form(&self, z: C, rhs: &DVector<f64>, power: u32) -> Result<C> {
        let n = self.dim();
        let m = DMatrix::<C>::from_fn(n, n, |i, j| {
            let d = if i == j { z } else { re(0.0) };
            -d - self.t[(i, j)]
        });
        let lu = m.lu();
        let mut x = DVector::<C>::from_fn(n, |i, _| re(rhs[i]));
        for _ in 0..power {
            x = lu.solve(&x).ok_or(Error::PoleEvaluation { z })?;
        }
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::PoleEvaluation { z });
        }
        Ok(self.alpha.iter().zip(x.iter()).map(|(a, v)| v * *a).sum())
    }
}

/// Descending-ladder law `F(dx) = e^{κx} (α/c) Ḡ(x) dx` of a compound
/// Poisson risk process.
#[derive(Clone, Debug)]
pub struct ContinuousLadder {
    pub claims: DistributionModel,
    pub alpha: f64,
    pub premium: f64,
    pub kappa: f64,
}

/// Discrete ladder law `f(k) = e^{κk} P[Z > k]` of the binomial risk model.
#[derive(Clone, Debug)]
pub struct DiscreteLadder {
    pub claims: DistributionModel,
    pub kappa: f64,
    // explicit pmf when the claims have finite support
    pmf: Option<Vec<f64>>,
}

impl DiscreteLadder {
    pub fn pmf(&self) -> Option<&[f64]> {
        self.pmf.as_deref()
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    /// Finite support `{0, …, K}`.
    DiscretePmf { pmf: Vec<f64> },
    /// `P(k) = C(k+n-1, k) p^k (1-p)^n`, `k ≥ 0`.
    NegativeBinomial { p: f64, n: u32 },
    /// Number of trials to the first success, support `{1, 2, …}`.
    Geometric { p: f64 },
    Exponential { rate: f64 },
    Erlang { stages: u32, rate: f64 },
    Hyperexponential { probs: Vec<f64>, rates: Vec<f64> },
    MatrixExponential(MatrixExponential),
    Uniform01,
    /// `min(V, priority)` with `V ~ Exp(rate)`.
    TruncatedExponential { rate: f64, priority: f64 },
    LadderContinuous(Box<ContinuousLadder>),
    LadderDiscrete(Box<DiscreteLadder>),
}

/// A validated distribution on `[0, ∞)`.
#[derive(Clone, Debug)]
pub struct DistributionModel {
    family: Family,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidModel(msg.into()))
}

fn check_prob(p: f64, name: &str) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("{name} must lie in (0, 1), got {p}"));
    }
    Ok(())
}

fn check_rate(r: f64, name: &str) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("{name} must be positive and finite, got {r}"));
    }
    Ok(())
}

impl DistributionModel {
    pub fn discrete_pmf(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() {
            return invalid("pmf must be non-empty");
        }
        if pmf.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return invalid("pmf entries must be non-negative");
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("pmf sums to {total}, expected 1"));
        }
        let mut pmf = pmf;
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        Ok(Self { family: Family::DiscretePmf { pmf } })
    }

    pub fn negative_binomial(p: f64, n: u32) -> Result<Self> {
        check_prob(p, "p")?;
        if n == 0 {
            return invalid("n must be at least 1");
        }
        Ok(Self { family: Family::NegativeBinomial { p, n } })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return invalid(format!("p must lie in (0, 1], got {p}"));
        }
        Ok(Self { family: Family::Geometric { p } })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        check_rate(rate, "rate")?;
        Ok(Self { family: Family::Exponential { rate } })
    }

    pub fn erlang(stages: u32, rate: f64) -> Result<Self> {
        check_rate(rate, "rate")?;
        if stages == 0 {
            return invalid("stages must be at least 1");
        }
        Ok(Self { family: Family::Erlang { stages, rate } })
    }

    pub fn hyperexponential(probs: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.len() != rates.len() {
            return invalid("probs and rates must be non-empty and of equal length");
        }
        for r in &rates {
            check_rate(*r, "rate")?;
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return invalid("mixture weights must be non-negative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("mixture weights sum to {total}, expected 1"));
        }
        Ok(Self { family: Family::Hyperexponential { probs, rates } })
    }

    pub fn matrix_exponential(alpha: Vec<f64>, t: Vec<Vec<f64>>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || n > 20 {
            return invalid("matrix-exponential dimension must be between 1 and 20");
        }
        if t.len() != n || t.iter().any(|row| row.len() != n) {
            return invalid("T must be square and match the length of alpha");
        }
        if alpha.iter().any(|a| !(*a >= 0.0)) {
            return invalid("alpha entries must be non-negative");
        }
        let mass: f64 = alpha.iter().sum();
        if mass > 1.0 + 1e-12 || mass <= 0.0 {
            return invalid(format!("alpha must sum to a value in (0, 1], got {mass}"));
        }
        let tm = DMatrix::from_fn(n, n, |i, j| t[i][j]);
        for i in 0..n {
            if !(tm[(i, i)] < 0.0) {
                return invalid("diagonal of T must be strictly negative");
            }
            let row: f64 = (0..n).map(|j| tm[(i, j)]).sum();
            if row > 1e-12 {
                return invalid("row sums of T must be non-positive");
            }
            for j in 0..n {
                if i != j && tm[(i, j)] < 0.0 {
                    return invalid("off-diagonal entries of T must be non-negative");
                }
            }
        }
        if tm.clone().lu().determinant().abs() < 1e-300 {
            return invalid("T must be invertible");
        }
        let ones = DVector::from_element(n, 1.0);
        let exit = -(&tm * &ones);
        let alpha = DVector::from_vec(alpha);
        let mut me = MatrixExponential {
            alpha,
            t: tm,
            exit,
            ones,
            atom: (1.0 - mass).max(0.0),
            poles: Vec::new(),
            tail_poles: Vec::new(),
        };
        let eig: Vec<C> = me.t.clone().complex_eigenvalues().iter().map(|e| -*e).collect();
        let exit = me.exit.clone();
        let ones = me.ones.clone();
        me.poles = locate_pole_orders(&eig, |z| me.resolvent_form(z, &exit, 1));
        me.tail_poles = locate_pole_orders(&eig, |z| me.resolvent_form(z, &ones, 1));
        Ok(Self { family: Family::MatrixExponential(me) })
    }

    pub fn uniform01() -> Self {
        Self { family: Family::Uniform01 }
    }

    pub fn truncated_exponential(rate: f64, priority: f64) -> Result<Self> {
        check_rate(rate, "rate")?;
        check_rate(priority, "priority")?;
        Ok(Self { family: Family::TruncatedExponential { rate, priority } })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kind(&self) -> ModelKind {
        match &self.family {
            Family::DiscretePmf { .. } => ModelKind::DiscretePmf,
            Family::NegativeBinomial { .. } => ModelKind::NegativeBinomial,
            Family::Geometric { .. } => ModelKind::Geometric,
            Family::Exponential { .. } => ModelKind::Exponential,
            Family::Erlang { .. } => ModelKind::Erlang,
            Family::Hyperexponential { .. } => ModelKind::Hyperexponential,
            Family::MatrixExponential(_) => ModelKind::MatrixExponential,
            Family::Uniform01 => ModelKind::Uniform01,
            Family::TruncatedExponential { .. } => ModelKind::TruncatedExponential,
            Family::LadderContinuous(_) => ModelKind::LadderContinuous,
            Family::LadderDiscrete(_) => ModelKind::LadderDiscrete,
        }
    }

    /// Supported on the integers (mesh 1).
    pub fn is_lattice(&self) -> bool {
        matches!(
            self.family,
            Family::DiscretePmf { .. }
                | Family::NegativeBinomial { .. }
                | Family::Geometric { .. }
                | Family::LadderDiscrete(_)
        )
    }

    /// `g` is a rational function of `z` (non-lattice) with finitely many
    /// roots of `g = 1`.
    pub fn is_rational(&self) -> bool {
        match &self.family {
            Family::Exponential { .. }
            | Family::Erlang { .. }
            | Family::Hyperexponential { .. }
            | Family::MatrixExponential(_) => true,
            Family::LadderContinuous(l) => l.claims.is_rational(),
            _ => false,
        }
    }

    /// Finite support, if any (largest atom for lattice laws, right end of
    /// the support otherwise).
    pub fn support_bound(&self) -> Option<f64> {
        match &self.family {
            Family::DiscretePmf { pmf } => Some((pmf.len() - 1) as f64),
            Family::Uniform01 => Some(1.0),
            Family::TruncatedExponential { priority, .. } => Some(*priority),
            Family::Geometric { p } if *p == 1.0 => Some(1.0),
            Family::LadderContinuous(l) => l.claims.support_bound(),
            Family::LadderDiscrete(l) => l.pmf.as_ref().map(|f| (f.len() - 1) as f64),
            _ => None,
        }
    }

    /// Moment generating function `g(z) = E[e^{zX}]` (meromorphic extension).
    pub fn mgf(&self, z: C) -> Result<C> {
        self.eval(z, 0)
    }

    /// `g^{(order)}(z)` for `order ∈ {1, 2, 3}`.
    pub fn mgf_derivative(&self, z: C, order: u32) -> Result<C> {
        if !(1..=3).contains(&order) {
            return Err(Error::OutOfDomain { z, reason: "derivative order must be 1, 2 or 3" });
        }
        self.eval(z, order)
    }

    /// Raw derivative of any order up to 4 (internal callers need `g''''`
    /// for ladder tails of uniform claims).
    pub(crate) fn eval(&self, z: C, k: u32) -> Result<C> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::OutOfDomain { z, reason: "non-finite argument" });
        }
        match &self.family {
            Family::DiscretePmf { pmf } => Ok(lattice_poly(pmf, z, k)),
            Family::NegativeBinomial { p, n } => negative_binomial_eval(*p, *n, z, k),
            Family::Geometric { p } => geometric_eval(*p, z, k),
            Family::Exponential { rate } => {
                let d = *rate - z;
                pole_guard(d, z)?;
                Ok(re(factorial(k) * rate) / d.powu(k + 1))
            }
            Family::Erlang { stages, rate } => {
                let d = *rate - z;
                pole_guard(d, z)?;
                Ok(re(rising(*stages as f64, k) * rate.powi(*stages as i32)) / d.powu(stages + k))
            }
            Family::Hyperexponential { probs, rates } => {
                let mut s = re(0.0);
                for (p, r) in probs.iter().zip(rates) {
                    let d = *r - z;
                    pole_guard(d, z)?;
                    s += re(p * factorial(k) * r) / d.powu(k + 1);
                }
                Ok(s)
            }
            Family::MatrixExponential(me) => {
                guard_poles(&me.poles, z)?;
                let v = me.resolvent_form(z, &me.exit, k + 1)? * factorial(k);
                Ok(if k == 0 { v + me.atom } else { v })
            }
            Family::Uniform01 => Ok(uniform_moment_transform(z, k)),
            Family::TruncatedExponential { rate, priority } => {
                let d = *priority;
                let w = (z - *rate) * d;
                Ok(uniform_moment_transform(w, k) * (rate * d.powi(k as i32 + 1))
                    + w.exp() * d.powi(k as i32))
            }
            Family::LadderContinuous(l) => {
                let s = z + l.kappa;
                Ok(integrated_tail(&l.claims, s, k)? * (l.alpha / l.premium))
            }
            Family::LadderDiscrete(l) => l.eval(z, k),
        }
    }

    /// Poles of `g` inside the closed rectangle `[re_lo, re_hi] × [im_lo, im_hi]`.
    pub fn poles_in(&self, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Vec<Pole> {
        let base: Vec<Pole> = match &self.family {
            Family::Exponential { rate } => vec![Pole { location: re(*rate), order: 1 }],
            Family::Erlang { stages, rate } => vec![Pole { location: re(*rate), order: *stages }],
            Family::Hyperexponential { probs, rates } => merge_real_poles(
                rates.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(r, _)| *r),
            ),
            Family::MatrixExponential(me) => me.poles.clone(),
            Family::LadderContinuous(l) => l
                .claims
                .integrated_tail_poles()
                .into_iter()
                .map(|p| Pole { location: p.location - l.kappa, order: p.order })
                .collect(),
            Family::NegativeBinomial { p, n } => {
                return periodic_poles(-p.ln(), *n, im_lo, im_hi)
                    .into_iter()
                    .filter(|q| inside(q.location, re_lo, re_hi, im_lo, im_hi))
                    .collect()
            }
            Family::Geometric { p } if *p < 1.0 => {
                return periodic_poles(-(1.0 - p).ln(), 1, im_lo, im_hi)
                    .into_iter()
                    .filter(|q| inside(q.location, re_lo, re_hi, im_lo, im_hi))
                    .collect()
            }
            Family::LadderDiscrete(l) if l.pmf.is_none() => {
                let shifted: Vec<Pole> = l
                    .claims
                    .poles_in(re_lo + l.kappa, re_hi + l.kappa, im_lo, im_hi)
                    .into_iter()
                    .map(|q| Pole { location: q.location - l.kappa, order: q.order })
                    .collect();
                return shifted;
            }
            _ => Vec::new(),
        };
        base.into_iter()
            .filter(|q| inside(q.location, re_lo, re_hi, im_lo, im_hi))
            .collect()
    }

    /// Poles of the integrated-tail transform `∫ e^{sy} Ḡ(y) dy` (claims side).
    fn integrated_tail_poles(&self) -> Vec<Pole> {
        match &self.family {
            Family::Exponential { rate } => vec![Pole { location: re(*rate), order: 1 }],
            Family::Erlang { stages, rate } => vec![Pole { location: re(*rate), order: *stages }],
            Family::Hyperexponential { probs, rates } => merge_real_poles(
                rates.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(r, _)| *r),
            ),
            Family::MatrixExponential(me) => me.tail_poles.clone(),
            _ => Vec::new(),
        }
    }

    /// Nearest pole of `g` to `z` (searching a generous box around it).
    pub(crate) fn nearest_pole_distance(&self, z: C) -> f64 {
        let span = 8.0;
        self.poles_in(z.re - span, z.re + span, z.im - span, z.im + span)
            .iter()
            .map(|p| (p.location - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn moments(&self) -> MomentSummary {
        match &self.family {
            Family::DiscretePmf { pmf } => {
                let (m1, m2) = pmf.iter().enumerate().fold((0.0, 0.0), |(a, b), (k, p)| {
                    let k = k as f64;
                    (a + k * p, b + k * k * p)
                });
                MomentSummary { mu: m1, mu2: m2, mgf_radius: f64::INFINITY }
            }
            Family::NegativeBinomial { p, n } => {
                let n = *n as f64;
                let mu = n * p / (1.0 - p);
                let var = n * p / ((1.0 - p) * (1.0 - p));
                MomentSummary { mu, mu2: var + mu * mu, mgf_radius: -p.ln() }
            }
            Family::Geometric { p } => MomentSummary {
                mu: 1.0 / p,
                mu2: (2.0 - p) / (p * p),
                mgf_radius: if *p == 1.0 { f64::INFINITY } else { -(1.0 - p).ln() },
            },
            Family::Exponential { rate } => MomentSummary {
                mu: 1.0 / rate,
                mu2: 2.0 / (rate * rate),
                mgf_radius: *rate,
            },
            Family::Erlang { stages, rate } => {
                let n = *stages as f64;
                MomentSummary { mu: n / rate, mu2: n * (n + 1.0) / (rate * rate), mgf_radius: *rate }
            }
            Family::Hyperexponential { probs, rates } => {
                let mut mu = 0.0;
                let mut mu2 = 0.0;
                let mut radius = f64::INFINITY;
                for (p, r) in probs.iter().zip(rates) {
                    mu += p / r;
                    mu2 += 2.0 * p / (r * r);
                    if *p > 0.0 {
                        radius = radius.min(*r);
                    }
                }
                MomentSummary { mu, mu2, mgf_radius: radius }
            }
            Family::MatrixExponential(me) => {
                let inv = (-me.t.clone()).try_inverse().expect("T validated invertible");
                let v1 = &inv * &me.ones;
                let v2 = &inv * &v1;
                let radius = me
                    .poles
                    .iter()
                    .map(|p| p.location.re)
                    .fold(f64::INFINITY, f64::min);
                MomentSummary { mu: me.alpha.dot(&v1), mu2: 2.0 * me.alpha.dot(&v2), mgf_radius: radius }
            }
            Family::Uniform01 => MomentSummary { mu: 0.5, mu2: 1.0 / 3.0, mgf_radius: f64::INFINITY },
            Family::TruncatedExponential { rate, priority } => {
                let e = (-rate * priority).exp();
                MomentSummary {
                    mu: -(-rate * priority).exp_m1() / rate,
                    mu2: 2.0 * (1.0 - e * (1.0 + rate * priority)) / (rate * rate),
                    mgf_radius: f64::INFINITY,
                }
            }
            Family::LadderContinuous(_) | Family::LadderDiscrete(_) => {
                let mu = self.eval(re(0.0), 1).map(|v| v.re).unwrap_or(f64::NAN);
                let mu2 = self.eval(re(0.0), 2).map(|v| v.re).unwrap_or(f64::NAN);
                let radius = match &self.family {
                    Family::LadderContinuous(l) => l.claims.moments().mgf_radius - l.kappa,
                    Family::LadderDiscrete(l) => l.claims.moments().mgf_radius - l.kappa,
                    _ => unreachable!(),
                };
                MomentSummary { mu, mu2, mgf_radius: radius }
            }
        }
    }

    /// Survival function `P(X > x)`.
    pub fn tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        match &self.family {
            Family::DiscretePmf { pmf } => lattice_tail(pmf.iter().copied(), x),
            Family::Geometric { p } => {
                if *p == 1.0 {
                    if x < 1.0 { 1.0 } else { 0.0 }
                } else {
                    (1.0 - p).powf(x.floor())
                }
            }
            Family::NegativeBinomial { p, n } => {
                // upward summation keeps relative accuracy deep in the tail
                let k = x.floor() as usize;
                let mode = ((*n as f64 - 1.0) * p / (1.0 - p)).floor().max(0.0) as usize;
                if k < mode {
                    let cdf: f64 = (0..=k).map(|j| self.lattice_mass(j)).sum();
                    return (1.0 - cdf).max(0.0);
                }
                let mut sum = 0.0;
                let mut j = k + 1;
                loop {
                    let t = self.lattice_mass(j);
                    sum += t;
                    if t <= 1e-18 * sum || t == 0.0 {
                        break;
                    }
                    j += 1;
                }
                sum
            }
            Family::Exponential { rate } => (-rate * x).exp(),
            Family::Erlang { stages, rate } => {
                let lx = rate * x;
                let mut term = 1.0;
                let mut s = 0.0;
                for k in 0..*stages {
                    s += term;
                    term *= lx / (k + 1) as f64;
                }
                (-lx).exp() * s
            }
            Family::Hyperexponential { probs, rates } => {
                probs.iter().zip(rates).map(|(p, r)| p * (-r * x).exp()).sum()
            }
            Family::MatrixExponential(me) => {
                if x == 0.0 {
                    return me.alpha.sum();
                }
                let e = (&me.t * x).exp();
                me.alpha.dot(&(e * &me.ones))
            }
            Family::Uniform01 => (1.0 - x).clamp(0.0, 1.0),
            Family::TruncatedExponential { rate, priority } => {
                if x >= *priority {
                    0.0
                } else {
                    (-rate * x).exp()
                }
            }
            Family::LadderContinuous(l) => {
                // 1 - ∫_0^x (α/c) e^{κy} Ḡ(y) dy
                let f = |y: f64| l.alpha / l.premium * (l.kappa * y).exp() * l.claims.tail(y);
                (1.0 - crate::quad::integrate(f, 0.0, x, 1e-13)).clamp(0.0, 1.0)
            }
            Family::LadderDiscrete(_) => {
                let k = x.floor() as usize;
                let cdf: f64 = (0..=k).map(|j| self.lattice_mass(j)).sum();
                (1.0 - cdf).clamp(0.0, 1.0)
            }
        }
    }

    /// `P(X = k)` for lattice laws (0 otherwise).
    pub fn lattice_mass(&self, k: usize) -> f64 {
        match &self.family {
            Family::DiscretePmf { pmf } => pmf.get(k).copied().unwrap_or(0.0),
            Family::NegativeBinomial { p, n } => {
                // C(k+n-1, k) p^k (1-p)^n through logs to stay finite for large k
                let ln = ln_binomial(k as u64 + *n as u64 - 1, k as u64)
                    + k as f64 * p.ln()
                    + *n as f64 * (1.0 - p).ln();
                ln.exp()
            }
            Family::Geometric { p } => {
                if k == 0 {
                    0.0
                } else if *p == 1.0 {
                    if k == 1 { 1.0 } else { 0.0 }
                } else {
                    p * (1.0 - p).powi(k as i32 - 1)
                }
            }
            Family::LadderDiscrete(l) => match &l.pmf {
                Some(f) => f.get(k).copied().unwrap_or(0.0),
                None => (l.kappa * k as f64).exp() * l.claims.tail(k as f64),
            },
            _ => 0.0,
        }
    }

    /// Lattice pmf truncated once the remaining tail mass drops below `eps`.
    pub fn truncated_pmf(&self, eps: f64) -> Result<Vec<f64>> {
        if !self.is_lattice() {
            return invalid("truncated_pmf requires a lattice law");
        }
        if let Family::DiscretePmf { pmf } = &self.family {
            return Ok(pmf.clone());
        }
        if let Family::LadderDiscrete(l) = &self.family {
            if let Some(f) = &l.pmf {
                return Ok(f.clone());
            }
        }
        let mut out = Vec::new();
        let mut acc = 0.0;
        for k in 0..1_000_000usize {
            let m = self.lattice_mass(k);
            out.push(m);
            acc += m;
            if 1.0 - acc < eps && k > 0 {
                break;
            }
        }
        Ok(out)
    }

    /// Density at `x`, taking the right limit (`right = true`) or left limit
    /// at jump points. Lattice laws have no density.
    pub fn density(&self, x: f64, right: bool) -> Result<f64> {
        if x < 0.0 || (x == 0.0 && !right) {
            return Ok(0.0);
        }
        Ok(match &self.family {
            Family::Exponential { rate } => rate * (-rate * x).exp(),
            Family::Erlang { stages, rate } => {
                let n = *stages as i32;
                rate.powi(n) * x.powi(n - 1) * (-rate * x).exp() / factorial(*stages - 1)
            }
            Family::Hyperexponential { probs, rates } => {
                probs.iter().zip(rates).map(|(p, r)| p * r * (-r * x).exp()).sum()
            }
            Family::MatrixExponential(me) => {
                let e = (&me.t * x).exp();
                me.alpha.dot(&(e * &me.exit))
            }
            Family::Uniform01 => {
                if x < 1.0 || (x == 1.0 && !right) {
                    1.0
                } else {
                    0.0
                }
            }
            Family::TruncatedExponential { rate, priority } => {
                if x < *priority || (x == *priority && !right) {
                    rate * (-rate * x).exp()
                } else {
                    0.0
                }
            }
            Family::LadderContinuous(l) => {
                let tail = if right { l.claims.tail(x) } else { l.claims.tail_left(x) };
                l.alpha / l.premium * (l.kappa * x).exp() * tail
            }
            _ => return invalid("lattice laws have no density"),
        })
    }

    /// `P(X ≥ x)` for continuous claim laws (differs from `tail` at atoms).
    fn tail_left(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms().iter().filter(|(a, _)| *a == x).map(|(_, m)| m).sum();
        self.tail(x) + atoms
    }

    /// Point masses of a non-lattice law.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match &self.family {
            Family::TruncatedExponential { rate, priority } => {
                vec![(*priority, (-rate * priority).exp())]
            }
            Family::MatrixExponential(me) if me.atom > 0.0 => vec![(0.0, me.atom)],
            _ => Vec::new(),
        }
    }

    /// Description of a base family, for serialization.
    pub fn spec(&self) -> Option<ModelSpec> {
        Some(match &self.family {
            Family::DiscretePmf { pmf } => ModelSpec::DiscretePmf { pmf: pmf.clone() },
            Family::NegativeBinomial { p, n } => ModelSpec::NegativeBinomial { p: *p, n: *n },
            Family::Geometric { p } => ModelSpec::Geometric { p: *p },
            Family::Exponential { rate } => ModelSpec::Exponential { rate: *rate },
            Family::Erlang { stages, rate } => ModelSpec::Erlang { stages: *stages, rate: *rate },
            Family::Hyperexponential { probs, rates } => {
                ModelSpec::Hyperexponential { probs: probs.clone(), rates: rates.clone() }
            }
            Family::MatrixExponential(me) => ModelSpec::MatrixExponential {
                alpha: me.alpha.iter().copied().collect(),
                t: (0..me.dim()).map(|i| (0..me.dim()).map(|j| me.t[(i, j)]).collect()).collect(),
            },
            Family::Uniform01 => ModelSpec::Uniform01 {},
            Family::TruncatedExponential { rate, priority } => {
                ModelSpec::TruncatedExponential { rate: *rate, priority: *priority }
            }
            _ => return None,
        })
    }
}

impl DiscreteLadder {
    fn eval(&self, z: C, k: u32) -> Result<C> {
        if let Some(f) = &self.pmf {
            return Ok(lattice_poly(f, z, k));
        }
        if k > 0 {
            let model = DistributionModel {
                family: Family::LadderDiscrete(Box::new(self.clone())),
            };
            let radius = (0.5 * model.nearest_pole_distance(z)).min(0.05);
            let err = std::cell::RefCell::new(None);
            let v = cauchy_derivative(
                |w| match self.closed_form(w) {
                    Ok(v) => v,
                    Err(e) => {
                        *err.borrow_mut() = Some(e);
                        re(f64::NAN)
                    }
                },
                z,
                k,
                radius,
            );
            return match err.into_inner() {
                Some(e) => Err(e),
                None => Ok(v),
            };
        }
        self.closed_form(z)
    }

    /// `(1 - E e^{sZ}) / (1 - e^s)` with `s = z + κ`, patched near `s ∈ 2πiℤ`.
    fn closed_form(&self, z: C) -> Result<C> {
        let s = z + self.kappa;
        let k = (s.im / (2.0 * PI)).round();
        let center = c(0.0, 2.0 * PI * k);
        let raw = |w: C| -> C {
            let m = self.claims.mgf(w).unwrap_or(re(f64::NAN));
            (re(1.0) - m) / (-expm1(w))
        };
        if (s - center).norm() < REMOVABLE_RADIUS {
            return Ok(removable_patch(raw, center, s));
        }
        let m = self.claims.mgf(s)?;
        Ok((re(1.0) - m) / (-expm1(s)))
    }
}

/// `∫_0^∞ e^{sy} Ḡ(y) dy` and its derivatives, per claim family.
pub(crate) fn integrated_tail(claims: &DistributionModel, s: C, k: u32) -> Result<C> {
    let kf = factorial(k);
    match claims.family() {
        Family::Exponential { rate } => {
            let d = *rate - s;
            pole_guard(d, s)?;
            Ok(re(kf) / d.powu(k + 1))
        }
        Family::Erlang { stages, rate } => {
            let d = *rate - s;
            pole_guard(d, s)?;
            let mut sum = re(0.0);
            for j in 0..*stages {
                sum += re(rate.powi(j as i32) * rising(j as f64 + 1.0, k)) / d.powu(j + k + 1);
            }
            Ok(sum)
        }
        Family::Hyperexponential { probs, rates } => {
            let mut sum = re(0.0);
            for (p, r) in probs.iter().zip(rates) {
                let d = *r - s;
                pole_guard(d, s)?;
                sum += re(p * kf) / d.powu(k + 1);
            }
            Ok(sum)
        }
        Family::MatrixExponential(me) => {
            guard_poles(&me.tail_poles, s)?;
            Ok(me.resolvent_form(s, &me.ones, k + 1)? * kf)
        }
        Family::Uniform01 => Ok(uniform_moment_transform(s, k) - uniform_moment_transform(s, k + 1)),
        Family::TruncatedExponential { rate, priority } => {
            let d = *priority;
            Ok(uniform_moment_transform((s - *rate) * d, k) * d.powi(k as i32 + 1))
        }
        _ => invalid("continuous ladder laws need a continuous claim family"),
    }
}

/// Builds the ladder-height law `F(dx) = e^{κx}(α/c)Ḡ(x)dx` of the compound
/// Poisson risk process with claim law `claims`, intensity `alpha` and
/// premium rate `c`.
pub fn tilt_ladder_continuous(
    claims: &DistributionModel,
    alpha: f64,
    c: f64,
    kappa: f64,
) -> Result<DistributionModel> {
    check_rate(alpha, "alpha")?;
    check_rate(c, "premium")?;
    if claims.is_lattice() {
        return invalid("continuous risk model needs a non-lattice claim law");
    }
    let m = claims.moments().mu;
    let loading = c - alpha * m;
    if loading <= 0.0 {
        return Err(Error::NegativeLoading { loading });
    }
    let ladder = DistributionModel {
        family: Family::LadderContinuous(Box::new(ContinuousLadder {
            claims: claims.clone(),
            alpha,
            premium: c,
            kappa,
        })),
    };
    let g0 = ladder.mgf(re(0.0))?;
    if (g0 - 1.0).norm() > 1e-10 {
        return invalid(format!("kappa = {kappa} does not solve the Lundberg equation (g(0) = {g0})"));
    }
    Ok(ladder)
}

/// Builds the discrete ladder law `f(k) = e^{κk} P[Z > k]` of the binomial
/// risk model with claim pmf `claims`.
pub fn tilt_ladder_discrete(claims: &DistributionModel, kappa: f64) -> Result<DistributionModel> {
    if !claims.is_lattice() {
        return invalid("discrete risk model needs a lattice claim law");
    }
    let m = claims.moments().mu;
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::NegativeLoading { loading: 1.0 - m });
    }
    let pmf = match claims.family() {
        Family::DiscretePmf { pmf } => {
            let mut tail = 1.0 - pmf[0];
            let mut f = Vec::with_capacity(pmf.len());
            for k in 0..pmf.len().saturating_sub(1) {
                f.push((kappa * k as f64).exp() * tail.max(0.0));
                tail -= pmf[k + 1];
            }
            if f.is_empty() {
                f.push(0.0);
            }
            Some(f)
        }
        _ => None,
    };
    let ladder = DistributionModel {
        family: Family::LadderDiscrete(Box::new(DiscreteLadder { claims: claims.clone(), kappa, pmf })),
    };
    let g0 = ladder.mgf(re(0.0))?;
    if (g0 - 1.0).norm() > 1e-10 {
        return invalid(format!("kappa = {kappa} does not solve the Lundberg equation (g(0) = {g0})"));
    }
    Ok(ladder)
}

fn inside(z: C, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> bool {
    z.re >= re_lo && z.re <= re_hi && z.im >= im_lo && z.im <= im_hi
}

fn periodic_poles(real: f64, order: u32, im_lo: f64, im_hi: f64) -> Vec<Pole> {
    if !(im_lo.abs() < 1e12 && im_hi.abs() < 1e12) || im_hi - im_lo > 1e6 {
        return Vec::new();
    }
    let k_lo = (im_lo / (2.0 * PI)).floor() as i64 - 1;
    let k_hi = (im_hi / (2.0 * PI)).ceil() as i64 + 1;
    (k_lo..=k_hi)
        .map(|k| Pole { location: c(real, 2.0 * PI * k as f64), order })
        .collect()
}

fn merge_real_poles(rates: impl Iterator<Item = f64>) -> Vec<Pole> {
    let mut out: Vec<Pole> = Vec::new();
    for r in rates {
        if !out.iter().any(|p| (p.location.re - r).abs() < 1e-14 * r.max(1.0)) {
            out.push(Pole { location: re(r), order: 1 });
        }
    }
    out
}

/// Orders of the candidate poles `eig` of `f`, read off the winding number
/// of `f` on small circles; cancelled candidates are dropped.
fn locate_pole_orders<F>(eig: &[C], f: F) -> Vec<Pole>
where
    F: Fn(C) -> Result<C>,
{
    let mut clusters: Vec<C> = Vec::new();
    for e in eig {
        if !clusters.iter().any(|c0| (*c0 - e).norm() < 1e-8) {
            clusters.push(*e);
        }
    }
    let mut out = Vec::new();
    for (i, center) in clusters.iter().enumerate() {
        let sep = clusters
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, o)| (o - center).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = (0.3 * sep).min(1e-3 * center.norm().max(1.0));
        let nodes = 512;
        let mut total = 0.0;
        let mut prev: Option<C> = None;
        let mut first: Option<C> = None;
        for j in 0..=nodes {
            let w = *center + C::from_polar(radius, 2.0 * PI * j as f64 / nodes as f64);
            let v = match f(w) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if let Some(p) = prev {
                total += (v / p).arg();
            } else {
                first = Some(v);
            }
            prev = Some(v);
        }
        let _ = first;
        let order = (-total / (2.0 * PI)).round();
        if order >= 1.0 {
            out.push(Pole { location: *center, order: order as u32 });
        }
    }
    out
}

fn pole_guard(d: C, z: C) -> Result<()> {
    if d.norm() < POLE_TOL {
        return Err(Error::PoleEvaluation { z });
    }
    Ok(())
}

fn guard_poles(poles: &[Pole], z: C) -> Result<()> {
    for p in poles {
        if (p.location - z).norm() < POLE_TOL {
            return Err(Error::PoleEvaluation { z });
        }
    }
    Ok(())
}

/// `Σ_j pmf[j] j^k e^{zj}` by Horner in `e^z`.
fn lattice_poly(pmf: &[f64], z: C, k: u32) -> C {
    let w = z.exp();
    let mut acc = re(0.0);
    for (j, p) in pmf.iter().enumerate().rev() {
        acc = acc * w + p * (j as f64).powi(k as i32);
    }
    acc
}

fn lattice_tail(pmf: impl Iterator<Item = f64>, x: f64) -> f64 {
    pmf.enumerate().filter(|(k, _)| (*k as f64) > x).map(|(_, p)| p).sum()
}

fn negative_binomial_eval(p: f64, n: u32, z: C, k: u32) -> Result<C> {
    let pw = z.exp() * p;
    let d = re(1.0) - pw;
    pole_guard(d, z)?;
    let g = (re(1.0 - p) / d).powu(n);
    let y = pw / d;
    let nf = n as f64;
    let factor = match k {
        0 => re(1.0),
        1 => y * nf,
        2 => (y + y * y * (nf + 1.0)) * nf,
        3 => {
            let a = y * y * nf + y * y * y * nf * (nf + 1.0);
            let b = (y + y * y) * (re(1.0) + y * (2.0 * (nf + 1.0)));
            (a + b) * nf
        }
        _ => return Err(Error::OutOfDomain { z, reason: "derivative order above 3" }),
    };
    Ok(g * factor)
}

fn geometric_eval(p: f64, z: C, k: u32) -> Result<C> {
    if p == 1.0 {
        return Ok(z.exp());
    }
    let q = 1.0 - p;
    let d = re(1.0) - z.exp() * q;
    pole_guard(d, z)?;
    let t = d.inv();
    let t1 = t * t - t;
    let t2 = (t * 2.0 - 1.0) * t1;
    let t3 = t1 * t1 * 2.0 + (t * 2.0 - 1.0) * t2;
    let r = p / q;
    Ok(match k {
        0 => (t - 1.0) * r,
        1 => t1 * r,
        2 => t2 * r,
        3 => t3 * r,
        _ => return Err(Error::OutOfDomain { z, reason: "derivative order above 3" }),
    })
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|j| ((n - j) as f64).ln() - ((j + 1) as f64).ln()).sum()
}

/// Model file body: `{"kind": …, "params": {…}, "lattice": bool}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    DiscretePmf { pmf: Vec<f64> },
    NegativeBinomial { p: f64, n: u32 },
    Geometric { p: f64 },
    Exponential { rate: f64 },
    Erlang { stages: u32, rate: f64 },
    Hyperexponential { probs: Vec<f64>, rates: Vec<f64> },
    MatrixExponential { alpha: Vec<f64>, t: Vec<Vec<f64>> },
    Uniform01 {},
    TruncatedExponential { rate: f64, priority: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub spec: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<bool>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<DistributionModel> {
        match self.clone() {
            ModelSpec::DiscretePmf { pmf } => DistributionModel::discrete_pmf(pmf),
            ModelSpec::NegativeBinomial { p, n } => DistributionModel::negative_binomial(p, n),
            ModelSpec::Geometric { p } => DistributionModel::geometric(p),
            ModelSpec::Exponential { rate } => DistributionModel::exponential(rate),
            ModelSpec::Erlang { stages, rate } => DistributionModel::erlang(stages, rate),
            ModelSpec::Hyperexponential { probs, rates } => {
                DistributionModel::hyperexponential(probs, rates)
            }
            ModelSpec::MatrixExponential { alpha, t } => DistributionModel::matrix_exponential(alpha, t),
            ModelSpec::Uniform01 {} => Ok(DistributionModel::uniform01()),
            ModelSpec::TruncatedExponential { rate, priority } => {
                DistributionModel::truncated_exponential(rate, priority)
            }
        }
    }
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<DistributionModel> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.build()
    }

    pub fn build(&self) -> Result<DistributionModel> {
        let model = self.spec.build()?;
        if let Some(l) = self.lattice {
            if l != model.is_lattice() {
                return invalid(format!(
                    "lattice flag {l} contradicts kind {}",
                    model.kind()
                ));
            }
        }
        Ok(model)
    }

    pub fn load(path: &std::path::Path) -> Result<DistributionModel> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn of(model: &DistributionModel) -> Option<Self> {
        Some(Self { spec: model.spec()?, lattice: Some(model.is_lattice()) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmath::c;

    fn erlang22() -> DistributionModel {
        DistributionModel::erlang(2, 2.0).unwrap()
    }

    fn all_models() -> Vec<DistributionModel> {
        vec![
            DistributionModel::discrete_pmf(vec![0.2, 0.5, 0.3]).unwrap(),
            DistributionModel::negative_binomial(0.4, 3).unwrap(),
            DistributionModel::geometric(0.5).unwrap(),
            DistributionModel::exponential(2.0).unwrap(),
            erlang22(),
            DistributionModel::hyperexponential(vec![0.3, 0.7], vec![1.0, 3.0]).unwrap(),
            DistributionModel::matrix_exponential(
                vec![0.6, 0.4],
                vec![vec![-3.0, 1.0], vec![0.5, -2.0]],
            )
            .unwrap(),
            DistributionModel::uniform01(),
            DistributionModel::truncated_exponential(1.0, 2.0).unwrap(),
        ]
    }

    #[test]
    fn mgf_at_origin_is_one() {
        for m in all_models() {
            let g = m.mgf(re(0.0)).unwrap();
            assert!((g - 1.0).norm() < 1e-13, "{}: {g}", m.kind());
        }
    }

    #[test]
    fn erlang_values_and_derivative() {
        let m = erlang22();
        assert!((m.mgf(re(4.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((m.mgf_derivative(re(4.0), 1).unwrap() + 1.0).norm() < 1e-14);
        // finite-difference oracle
        let h = 1e-6;
        let fd = (m.mgf(re(4.0 + h)).unwrap() - m.mgf(re(4.0 - h)).unwrap()) / (2.0 * h);
        assert!((fd + 1.0).norm() < 1e-6);
    }

    #[test]
    fn erlang_mgf_matches_quadrature() {
        // ∫_0^40 e^{4x} 4x e^{-2x} dx diverges; the closed form at z = 4 lives
        // on the meromorphic extension. Check inside the strip instead.
        let m = erlang22();
        let z = 1.3;
        let q = crate::quad::integrate(|x| (z * x).exp() * 4.0 * x * (-2.0 * x).exp(), 0.0, 60.0, 1e-13);
        assert!((m.mgf(re(z)).unwrap().re - q).abs() < 1e-9);
    }

    #[test]
    fn uniform_removable_point() {
        let u = DistributionModel::uniform01();
        assert!((u.mgf(re(0.0)).unwrap() - 1.0).norm() < 1e-16);
        assert!((u.mgf_derivative(re(0.0), 1).unwrap() - 0.5).norm() < 1e-15);
        assert!((u.mgf_derivative(re(0.0), 2).unwrap() - 1.0 / 3.0).norm() < 1e-15);
        let z = c(3e-5, -2e-5);
        let exact = (z.exp() - 1.0) / z;
        assert!((u.mgf(z).unwrap() - exact).norm() < 1e-11);
    }

    #[test]
    fn exponential_derivative_at_zero_is_mean() {
        let m = DistributionModel::exponential(2.0).unwrap();
        assert!((m.mgf_derivative(re(0.0), 1).unwrap() - 0.5).norm() < 1e-15);
    }

    #[test]
    fn pole_evaluation_is_reported() {
        let m = DistributionModel::exponential(2.0).unwrap();
        assert!(matches!(m.mgf(re(2.0)), Err(Error::PoleEvaluation { .. })));
        let nb = DistributionModel::negative_binomial(0.5, 2).unwrap();
        assert!(matches!(nb.mgf(c(2f64.ln(), 2.0 * PI)), Err(Error::PoleEvaluation { .. })));
    }

    #[test]
    fn moments_match_direct_sums() {
        let g = DistributionModel::geometric(0.5).unwrap();
        let (mut m1, mut m2) = (0.0, 0.0);
        for k in 1..=200 {
            let p = g.lattice_mass(k);
            m1 += k as f64 * p;
            m2 += (k * k) as f64 * p;
        }
        let s = g.moments();
        assert!((s.mu - 2.0).abs() < 1e-12 && (m1 - 2.0).abs() < 1e-12);
        assert!((s.mu2 - 6.0).abs() < 1e-12 && (m2 - 6.0).abs() < 1e-10);

        let e = erlang22().moments();
        assert!((e.mu - 1.0).abs() < 1e-15 && (e.mu2 - 1.5).abs() < 1e-15);
        let q1 = crate::quad::integrate(|x| x * 4.0 * x * (-2.0 * x).exp(), 0.0, 60.0, 1e-13);
        let q2 = crate::quad::integrate(|x| x * x * 4.0 * x * (-2.0 * x).exp(), 0.0, 60.0, 1e-13);
        assert!((q1 - 1.0).abs() < 1e-10 && (q2 - 1.5).abs() < 1e-10);

        let u = DistributionModel::uniform01().moments();
        assert_eq!((u.mu, u.mu2), (0.5, 1.0 / 3.0));
    }

    #[test]
    fn moments_agree_with_derivatives_at_zero() {
        for m in all_models() {
            let s = m.moments();
            let d1 = m.mgf_derivative(re(0.0), 1).unwrap().re;
            let d2 = m.mgf_derivative(re(0.0), 2).unwrap().re;
            assert!((s.mu - d1).abs() < 1e-10 * s.mu.max(1.0), "{}", m.kind());
            assert!((s.mu2 - d2).abs() < 1e-9 * s.mu2.max(1.0), "{}", m.kind());
            assert!(s.mu2 >= s.mu * s.mu && s.mgf_radius > 0.0);
        }
    }

    #[test]
    fn tails() {
        let t = DistributionModel::truncated_exponential(1.0, 2.0).unwrap();
        assert_eq!(t.tail(2.0), 0.0);
        assert_eq!(DistributionModel::exponential(1.0).unwrap().tail(0.0), 1.0);
        let d = DistributionModel::discrete_pmf(vec![0.7, 0.0, 0.3]).unwrap();
        assert!((d.tail(1.0) - 0.3).abs() < 1e-15);
        let me = DistributionModel::matrix_exponential(vec![1.0, 0.0], vec![vec![-2.0, 2.0], vec![0.0, -2.0]])
            .unwrap();
        let x: f64 = 0.8;
        let erl = (-2.0 * x).exp() * (1.0 + 2.0 * x);
        assert!((me.tail(x) - erl).abs() < 1e-13);
    }

    #[test]
    fn matrix_exponential_poles_have_orders() {
        let me = DistributionModel::matrix_exponential(vec![1.0, 0.0], vec![vec![-2.0, 2.0], vec![0.0, -2.0]])
            .unwrap();
        let poles = me.poles_in(-10.0, 10.0, -10.0, 10.0);
        assert_eq!(poles.len(), 1);
        assert_eq!(poles[0].order, 2);
        assert!((poles[0].location - 2.0).norm() < 1e-6);
        // same law as Erlang(2, 2)
        let z = c(0.7, 1.9);
        assert!((me.mgf(z).unwrap() - erlang22().mgf(z).unwrap()).norm() < 1e-13);
        assert!((me.mgf_derivative(z, 2).unwrap() - erlang22().mgf_derivative(z, 2).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn exponential_claims_tilt_to_exponential() {
        let (lambda, alpha, prem) = (3.0, 1.0, 1.0);
        let claims = DistributionModel::exponential(lambda).unwrap();
        let kappa = lambda - alpha / prem;
        let ladder = tilt_ladder_continuous(&claims, alpha, prem, kappa).unwrap();
        let rate = alpha / prem;
        for j in 0..20 {
            let z = -2.0 + 0.14 * j as f64;
            let expect = rate / (rate - z);
            assert!((ladder.mgf(re(z)).unwrap().re - expect).abs() < 1e-13);
            // quadrature of e^{zx} (α/c) e^{κx} Ḡ(x)
            let q = crate::quad::integrate(
                |x| (z * x).exp() * alpha / prem * (kappa * x).exp() * claims.tail(x),
                0.0,
                80.0,
                1e-13,
            );
            assert!((q - expect).abs() < 1e-8, "z={z}: {q} vs {expect}");
        }
        let mu = ladder.mgf_derivative(re(0.0), 1).unwrap().re;
        assert!(mu > 0.0 && (mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_tilt_example() {
        let claims = DistributionModel::discrete_pmf(vec![0.7, 0.0, 0.3]).unwrap();
        let kappa = (7.0f64 / 3.0).ln();
        let ladder = tilt_ladder_discrete(&claims, kappa).unwrap();
        let f = ladder.truncated_pmf(0.0).unwrap();
        assert!((f[0] - 0.3).abs() < 1e-15 && (f[1] - 0.7).abs() < 1e-14);
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((ladder.mgf(re(0.0)).unwrap() - 1.0).norm() < 1e-14);

        let degenerate = DistributionModel::discrete_pmf(vec![0.0, 1.0]).unwrap();
        assert!(matches!(tilt_ladder_discrete(&degenerate, 0.5), Err(Error::NegativeLoading { .. })));
    }

    #[test]
    fn discrete_tilt_closed_form_matches_explicit_sum() {
        // geometric claims on {0,1,..}: NB with n = 1
        let claims = DistributionModel::negative_binomial(0.3, 1).unwrap();
        let kappa = (0.7f64 / 0.3).ln();
        let ladder = tilt_ladder_discrete(&claims, kappa).unwrap();
        for z in [c(0.1, 0.4), c(-0.5, 2.0), c(1e-6, 0.0), re(-kappa + 1e-5)] {
            let direct: C = (0..400)
                .map(|k| ladder.lattice_mass(k) * (z * k as f64).exp())
                .sum();
            let g = ladder.mgf(z).unwrap();
            assert!((g - direct).norm() < 1e-9, "z={z}: {g} vs {direct}");
        }
        let d1 = ladder.mgf_derivative(c(0.2, 0.3), 1).unwrap();
        let h = 1e-6;
        let fd = (ladder.mgf(c(0.2 + h, 0.3)).unwrap() - ladder.mgf(c(0.2 - h, 0.3)).unwrap()) / (2.0 * h);
        assert!((d1 - fd).norm() < 1e-6);
    }

    #[test]
    fn model_file_round_trip() {
        let text = r#"{"kind": "erlang", "params": {"stages": 2, "rate": 2.0}, "lattice": false}"#;
        let m = ModelFile::from_json(text).unwrap();
        assert_eq!(m.kind(), ModelKind::Erlang);
        let u = ModelFile::from_json(r#"{"kind":"uniform01","params":{}}"#).unwrap();
        assert_eq!(u.kind(), ModelKind::Uniform01);
        let bad = ModelFile::from_json(r#"{"kind":"geometric","params":{"p":0.5},"lattice":false}"#);
        assert!(bad.is_err());
        let back = serde_json::to_string(&ModelFile::of(&m).unwrap()).unwrap();
        assert_eq!(ModelFile::from_json(&back).unwrap().kind(), ModelKind::Erlang);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(DistributionModel::discrete_pmf(vec![0.5, 0.4]).is_err());
        assert!(DistributionModel::negative_binomial(1.2, 2).is_err());
        assert!(DistributionModel::exponential(-1.0).is_err());
        assert!(DistributionModel::matrix_exponential(vec![1.0], vec![vec![0.5]]).is_err());
        assert!(DistributionModel::hyperexponential(vec![0.5, 0.6], vec![1.0, 2.0]).is_err());
    }
}
