//! Small complex-analysis helpers shared by the model, root and residue code.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type C = Complex64;

pub const I: C = C::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub(crate) fn expm1(z: C) -> C {
    let (x, y) = (z.re, z.im);
    let em1 = x.exp_m1();
    let half = (0.5 * y).sin();
    // cos y - 1 = -2 sin^2(y/2)
    C::new(em1 * y.cos() - 2.0 * half * half, x.exp() * y.sin())
}

/// `E_k(u) = ∫_0^1 t^k e^{u t} dt`, the building block for uniform and
/// truncated laws. Power series near the origin, upward recursion outside.
pub(crate) fn uniform_moment_transform(u: C, k: u32) -> C {
    if u.norm() < 2.0 {
        let mut term = re(1.0); // u^n / n!
        let mut sum = C::new(0.0, 0.0);
        for n in 0..60u32 {
            let add = term / (n + k + 1) as f64;
            sum += add;
            if n > 4 && add.norm() < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
            term = term * u / (n + 1) as f64;
        }
        sum
    } else {
        let eu = u.exp();
        let mut e = expm1(u) / u;
        for j in 1..=k {
            e = (eu - e * j as f64) / u;
        }
        e
    }
}

/// Taylor coefficients `a_0..a_{n-1}` of an analytic `f` about `center`,
/// from an `nodes`-point trapezoid rule on a circle of the given radius.
pub(crate) fn taylor_coefficients<F>(f: F, center: C, radius: f64, n: usize, nodes: usize) -> Vec<C>
where
    F: Fn(C) -> C,
{
    let values: Vec<C> = (0..nodes)
        .map(|j| {
            let w = C::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
            f(center + w * radius)
        })
        .collect();
    (0..n)
        .map(|k| {
            let mut s = C::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let w = C::from_polar(1.0, -2.0 * PI * (j * k) as f64 / nodes as f64);
                s += v * w;
            }
            s / (nodes as f64 * radius.powi(k as i32))
        })
        .collect()
}

/// Evaluates `f` at `z` through an 8-term Taylor series about the removable
/// singularity `center`; the coefficients never touch `center` itself.
pub(crate) fn removable_patch<F>(f: F, center: C, z: C) -> C
where
    F: Fn(C) -> C,
{
    let coeffs = taylor_coefficients(f, center, 1e-2, 8, 32);
    let h = z - center;
    coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * h + a)
}

/// k-th derivative of `f` at `z` by the Cauchy integral formula
/// (128-node trapezoid on a circle).
pub(crate) fn cauchy_derivative<F>(f: F, z: C, order: u32, radius: f64) -> C
where
    F: Fn(C) -> C,
{
    let nodes = 128usize;
    let mut s = C::new(0.0, 0.0);
    for j in 0..nodes {
        let w = C::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
        s += f(z + w * radius) * w.powu(order).inv();
    }
    let fact: f64 = (1..=order).map(|v| v as f64).product();
    s * fact / (nodes as f64 * radius.powi(order as i32))
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Rising factorial `a (a+1) ... (a+k-1)`.
pub(crate) fn rising(a: f64, k: u32) -> f64 {
    (0..k).map(|j| a + j as f64).product()
}
