//! Exact samplers for the claim and inter-renewal families.

use crate::error::{Error, Result};
use crate::models::{DistributionModel, Family};
use rand::Rng;
use rand_distr::{Distribution, Exp};

#[derive(Clone, Debug)]
enum Plan {
    Table { cdf: Vec<f64> },
    NegativeBinomial { ln_p: f64, n: u32 },
    Geometric { ln_q: Option<f64> },
    Exponential(Exp<f64>),
    Erlang { exp: Exp<f64>, stages: u32 },
    Hyper { cdf: Vec<f64>, exps: Vec<Exp<f64>> },
    Phase { alpha_cdf: Vec<f64>, exps: Vec<Exp<f64>>, jump_cdf: Vec<Vec<f64>> },
    Uniform,
    Truncated { exp: Exp<f64>, priority: f64 },
}

/// Draws independent copies of a model's random variable.
#[derive(Clone, Debug)]
pub struct Sampler {
    plan: Plan,
}

fn cumulative(w: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    w.map(|v| {
        acc += v;
        acc
    })
    .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|c| u < *c).unwrap_or(cdf.len())
}

fn exp(rate: f64) -> Exp<f64> {
    Exp::new(rate).expect("validated positive rate")
}

impl Sampler {
    pub fn new(model: &DistributionModel) -> Result<Self> {
        let plan = match model.family() {
            Family::DiscretePmf { pmf } => Plan::Table { cdf: cumulative(pmf.iter().copied()) },
            Family::NegativeBinomial { p, n } => Plan::NegativeBinomial { ln_p: p.ln(), n: *n },
            Family::Geometric { p } => Plan::Geometric { ln_q: if *p < 1.0 { Some((1.0 - p).ln()) } else { None } },
            Family::Exponential { rate } => Plan::Exponential(exp(*rate)),
            Family::Erlang { stages, rate } => Plan::Erlang { exp: exp(*rate), stages: *stages },
            Family::Hyperexponential { probs, rates } => Plan::Hyper {
                cdf: cumulative(probs.iter().copied()),
                exps: rates.iter().map(|r| exp(*r)).collect(),
            },
            Family::MatrixExponential(me) => {
                let n = me.dim();
                let t = me.t();
                let exps = (0..n).map(|i| exp(-t[(i, i)])).collect();
                // row i: jumps to j ≠ i, then absorption (index n)
                let jump_cdf = (0..n)
                    .map(|i| {
                        let out = -t[(i, i)];
                        cumulative((0..=n).map(|j| {
                            if j == n {
                                me.exit()[i] / out
                            } else if j == i {
                                0.0
                            } else {
                                t[(i, j)] / out
                            }
                        }))
                    })
                    .collect();
                Plan::Phase { alpha_cdf: cumulative(me.alpha().iter().copied()), exps, jump_cdf }
            }
            Family::Uniform01 => Plan::Uniform,
            Family::TruncatedExponential { rate, priority } => Plan::Truncated { exp: exp(*rate), priority: *priority },
            Family::LadderContinuous(_) | Family::LadderDiscrete(_) => {
                return Err(Error::InvalidModel("ladder-height laws are not sampled".into()))
            }
        };
        Ok(Self { plan })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.plan {
            Plan::Table { cdf } => pick(cdf, rng.random::<f64>()).min(cdf.len() - 1) as f64,
            Plan::NegativeBinomial { ln_p, n } => {
                // failures before the n-th success, success probability 1 - p
                let mut k = 0.0;
                for _ in 0..*n {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    k += (u.ln() / ln_p).floor();
                }
                k
            }
            Plan::Geometric { ln_q } => match ln_q {
                Some(l) => 1.0 + ((1.0 - rng.random::<f64>()).ln() / l).floor(),
                None => 1.0,
            },
            Plan::Exponential(e) => e.sample(rng),
            Plan::Erlang { exp, stages } => (0..*stages).map(|_| exp.sample(rng)).sum(),
            Plan::Hyper { cdf, exps } => {
                let i = pick(cdf, rng.random::<f64>()).min(exps.len() - 1);
                exps[i].sample(rng)
            }
            Plan::Phase { alpha_cdf, exps, jump_cdf } => {
                let n = exps.len();
                let mut state = pick(alpha_cdf, rng.random::<f64>());
                let mut total = 0.0;
                while state < n {
                    total += exps[state].sample(rng);
                    state = pick(&jump_cdf[state], rng.random::<f64>()).min(n);
                }
                total
            }
            Plan::Uniform => rng.random::<f64>(),
            Plan::Truncated { exp, priority } => exp.sample(rng).min(*priority),
        }
    }
}
