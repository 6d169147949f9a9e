use super::{ErrorModel, OracleResult};
use crate::error::{Error, Result};
use crate::models::{DistributionModel, Family};
use nalgebra::{DMatrix, DVector};

/// Renewal masses `u_0..u_{k_max}` of a pmf on `{0, 1, …}` by the forward
/// recursion `u_k = (1{k=0} + Σ_{j≥1} p_j u_{k-j}) / (1 - p_0)`.
pub fn renewal_mass_exact(pmf: &[f64], k_max: usize) -> Result<Vec<f64>> {
    let p0 = pmf.first().copied().unwrap_or(0.0);
    if p0 >= 1.0 - 1e-12 {
        return Err(Error::MassAtZeroOne(p0));
    }
    let mut u = vec![0.0; k_max + 1];
    for k in 0..=k_max {
        let mut s = if k == 0 { 1.0 } else { 0.0 };
        for j in 1..=k.min(pmf.len().saturating_sub(1)) {
            s += pmf[j] * u[k - j];
        }
        u[k] = s / (1.0 - p0);
    }
    Ok(u)
}

/// `renewal_mass_exact` for a lattice model, truncated at `1e-16` tail mass.
pub fn renewal_mass_of(model: &DistributionModel, k_max: usize) -> Result<Vec<f64>> {
    let pmf = model.truncated_pmf(1e-16)?;
    renewal_mass_exact(&pmf, k_max)
}

fn density_average(model: &DistributionModel, y: f64) -> Result<f64> {
    Ok(0.5 * (model.density(y, false)? + model.density(y, true)?))
}

/// `U = 1 + F * U` on the grid `x_i = i h` by the trapezoid rule.
/// Jumps of the density at grid nodes use the average of both limits;
/// atoms are added explicitly, off-grid atoms by linear interpolation.
pub fn renewal_grid_continuous(model: &DistributionModel, x_max: f64, h: f64) -> Result<OracleResult> {
    if model.is_lattice() {
        return Err(Error::InvalidModel("grid solver needs a non-lattice law".into()));
    }
    let n = (x_max / h).round() as usize;
    let f: Vec<f64> = (0..=n)
        .map(|j| if j == 0 { model.density(0.0, true) } else { density_average(model, j as f64 * h) })
        .collect::<Result<_>>()?;
    let f_left: Vec<f64> = (0..=n).map(|j| model.density(j as f64 * h, false)).collect::<Result<_>>()?;
    let atoms = model.atoms();
    let atom0: f64 = atoms.iter().filter(|(a, _)| *a == 0.0).map(|(_, m)| m).sum();
    let mut u = vec![0.0; n + 1];
    for i in 0..=n {
        let mut s = 1.0;
        if i > 0 {
            let mut conv = 0.5 * f_left[i] * u[0];
            for j in 1..i {
                conv += f[j] * u[i - j];
            }
            s += h * conv;
        }
        for &(a, mass) in atoms.iter().filter(|(a, _)| *a > 0.0) {
            let pos = i as f64 - a / h;
            if pos >= 0.0 {
                let k = pos.floor() as usize;
                let t = pos - k as f64;
                let v = if t < 1e-12 { u[k] } else { u[k] * (1.0 - t) + u[k + 1] * t };
                s += mass * v;
            }
        }
        let diag = if i > 0 { 0.5 * h * f[0] } else { 0.0 } + atom0;
        u[i] = s / (1.0 - diag);
    }
    Ok(OracleResult {
        x: (0..=n).map(|i| i as f64 * h).collect(),
        values: u,
        method: "renewal_grid_trapezoid",
        error: ErrorModel::Grid { h, estimate: None },
    })
}

/// Richardson combination of the grid solver at steps `h` and `h/2`,
/// reported on the coarse grid with `|U_{h/2} - U_h|/3` as error estimate.
pub fn renewal_grid_richardson(model: &DistributionModel, x_max: f64, h: f64) -> Result<OracleResult> {
    let coarse = renewal_grid_continuous(model, x_max, h)?;
    let fine = renewal_grid_continuous(model, x_max, 0.5 * h)?;
    richardson(coarse, fine, h, "renewal_grid_richardson")
}

pub(super) fn richardson(coarse: OracleResult, fine: OracleResult, h: f64, method: &'static str) -> Result<OracleResult> {
    let mut values = Vec::with_capacity(coarse.values.len());
    let mut est = Vec::with_capacity(coarse.values.len());
    for (i, c) in coarse.values.iter().enumerate() {
        let f = fine.values[2 * i];
        values.push((4.0 * f - c) / 3.0);
        est.push((f - c).abs() / 3.0);
    }
    Ok(OracleResult { x: coarse.x, values, method, error: ErrorModel::Grid { h, estimate: Some(est) } })
}

/// Renewal function of `U(0,1)`: `U(x) = Σ_{k ≤ x} (-1)^k (x-k)^k e^{x-k} / k!`.
pub fn uniform_renewal_series(x: f64) -> f64 {
    let mut s = 0.0;
    let mut k = 0usize;
    while k as f64 <= x {
        let t = x - k as f64;
        let mut term = t.exp();
        for j in 1..=k {
            term *= t / j as f64;
        }
        if k % 2 == 1 {
            term = -term;
        }
        s += term;
        k += 1;
    }
    s
}

/// Renewal density of a phase-type law, `u(x) = α e^{(sα + T)x} s`.
pub fn phase_type_density(alpha: &[f64], t: &[Vec<f64>], x: f64) -> Result<f64> {
    let n = alpha.len();
    if t.len() != n || t.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidModel("T must be square and match alpha".into()));
    }
    let tm = DMatrix::from_fn(n, n, |i, j| t[i][j]);
    let a = DVector::from_column_slice(alpha);
    let s = -(&tm * DVector::from_element(n, 1.0));
    let gen = &s * a.transpose() + &tm;
    let e = (gen * x).exp();
    Ok(a.dot(&(e * s)))
}

/// `phase_type_density` for a matrix-exponential model.
pub fn phase_type_density_of(model: &DistributionModel, x: f64) -> Result<f64> {
    let Family::MatrixExponential(me) = model.family() else {
        return Err(Error::InvalidModel("phase-type density needs a matrix-exponential law".into()));
    };
    let n = me.dim();
    let alpha: Vec<f64> = me.alpha().iter().copied().collect();
    let t: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| me.t()[(i, j)]).collect()).collect();
    phase_type_density(&alpha, &t, x)
}
