//! Adaptive Gauss–Kronrod (7/15) quadrature on real intervals and on
//! complex line segments.

use crate::cmath::C;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate and error estimate of `∫_{-1}^{1} f(t) dt`, generic over
/// the value type.
fn gk15<T, F>(f: &mut F, mid: f64, half: f64) -> (T, f64)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T> + Norm,
    F: FnMut(f64) -> T,
{
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let err = (k - g).norm_abs() * half.abs();
    (k * half, err)
}

pub(crate) trait Norm {
    fn norm_abs(&self) -> f64;
}

impl Norm for f64 {
    fn norm_abs(&self) -> f64 {
        self.abs()
    }
}

impl Norm for C {
    fn norm_abs(&self) -> f64 {
        self.norm()
    }
}

/// Adaptive integral of a real function with absolute-or-relative tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    adaptive(&mut f, a, b, tol, 4000).0
}

/// Adaptive integral along `[0, 1]` of a complex-valued integrand; returns
/// the value and the number of function evaluations used, or `None` when the
/// evaluation budget is exhausted.
pub(crate) fn integrate_complex<F: FnMut(f64) -> C>(
    mut f: F,
    pieces: usize,
    tol: f64,
    max_evals: usize,
) -> Option<(C, usize)> {
    let mut total = C::new(0.0, 0.0);
    let mut evals = 0;
    let h = 1.0 / pieces as f64;
    for p in 0..pieces {
        let (v, _, n, ok) = adaptive_budget(&mut f, p as f64 * h, (p + 1) as f64 * h, tol / pieces as f64, max_evals - evals.min(max_evals));
        evals += n;
        if !ok {
            return None;
        }
        total += v;
    }
    Some((total, evals))
}

fn adaptive<T, F>(f: &mut F, a: f64, b: f64, tol: f64, max_intervals: usize) -> (T, f64)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T> + Norm,
    F: FnMut(f64) -> T,
{
    let (v, e, _, _) = adaptive_budget(f, a, b, tol, max_intervals * 15);
    (v, e)
}

fn adaptive_budget<T, F>(f: &mut F, a: f64, b: f64, tol: f64, max_evals: usize) -> (T, f64, usize, bool)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T> + Norm,
    F: FnMut(f64) -> T,
{
    // interval list with largest-error bisection
    let (v0, e0) = gk15(f, 0.5 * (a + b), 0.5 * (b - a));
    let mut evals = 15;
    let mut parts: Vec<(f64, f64, T, f64)> = vec![(a, b, v0, e0)];
    loop {
        let total: T = parts.iter().skip(1).fold(parts[0].2, |s, p| s + p.2);
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let scale = total.norm_abs();
        if err <= tol || err <= tol * scale {
            return (total, err, evals, true);
        }
        if evals + 30 > max_evals {
            return (total, err, evals, false);
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, p)| if p.3 > be { (i, p.3) } else { (bi, be) });
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return (total, err, evals, false);
        }
        let (v1, e1) = gk15(f, 0.5 * (lo + mid), 0.5 * (mid - lo));
        let (v2, e2) = gk15(f, 0.5 * (mid + hi), 0.5 * (hi - mid));
        evals += 30;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-14) - 9.0).abs() < 1e-12);
        assert!((integrate(|x| (-x).exp(), 0.0, 50.0, 1e-14) - 1.0).abs() < 1e-12);
        assert!((integrate(|x| x.sqrt(), 0.0, 1.0, 1e-12) - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn complex_segment() {
        // ∮ dz / z over the unit circle, parametrized on [0, 1]
        let two_pi = 2.0 * std::f64::consts::PI;
        let (v, _) = integrate_complex(
            |t| {
                let z = C::from_polar(1.0, two_pi * t);
                z.inv() * z * C::new(0.0, two_pi)
            },
            4,
            1e-12,
            10_000,
        )
        .unwrap();
        assert!((v - C::new(0.0, two_pi)).norm() < 1e-12);
    }
}
