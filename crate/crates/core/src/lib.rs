//! Residue expansions of renewal functions, renewal densities and ruin
//! probabilities.
//!
//! The renewal function of a law with transform `g` is recovered as a sum of
//! residues of `1/(1 - g)` at the roots of `g(z) = 1` in a right half-plane;
//! truncating the sum at `Re z ≤ r0` leaves an error of order `e^{-r0 x}`.
//! The same machinery, applied to exponentially tilted ladder-height laws,
//! yields high-order Cramér–Lundberg expansions of ruin probabilities.

pub mod cli;
pub mod cmath;
pub mod error;
pub mod models;
pub mod oracles;
pub(crate) mod quad;

pub use error::{Error, Result};
pub use models::{DistributionModel, ModelFile, ModelKind, ModelSpec, MomentSummary, Pole};
pub mod rootfinder;
pub mod residue;
pub mod expansion;
pub mod ruin;
pub mod validate;
