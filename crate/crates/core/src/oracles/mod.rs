//! Independent ground truth for the expansions: exact lattice recursions,
//! grid solvers for renewal-type integral equations, matrix-exponential
//! densities, dynamic programming and Monte Carlo.

mod montecarlo;
mod renewal;
mod ruin;
pub mod sampling;

pub use montecarlo::{renewal_mc, ruin_mc_bivariate, ruin_mc_continuous, BivariateMcEstimate, McEstimate, McSettings};
pub use renewal::{
    phase_type_density, phase_type_density_of, renewal_grid_continuous, renewal_grid_richardson, renewal_mass_exact, renewal_mass_of,
    uniform_renewal_series,
};
pub use ruin::{ruin_discrete_dp, ruin_discrete_residual, ruin_grid_continuous, ruin_grid_richardson};

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum ErrorModel {
    Exact,
    /// Discretization step; `estimate` is a pointwise error estimate when
    /// two resolutions were combined.
    Grid { h: f64, estimate: Option<Vec<f64>> },
    MonteCarlo { n_paths: u64, std_err: Vec<f64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub method: &'static str,
    pub error: ErrorModel,
}

impl OracleResult {
    /// Linear interpolation on the grid.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.x.len();
        if n == 1 || x <= self.x[0] {
            return self.values[0];
        }
        let h = self.x[1] - self.x[0];
        let i = ((x - self.x[0]) / h).floor() as usize;
        if i + 1 >= n {
            return self.values[n - 1];
        }
        let t = (x - self.x[i]) / h;
        if t.abs() < 1e-9 {
            return self.values[i];
        }
        if (1.0 - t).abs() < 1e-9 {
            return self.values[i + 1];
        }
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }
}
