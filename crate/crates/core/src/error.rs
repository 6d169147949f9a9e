use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by model evaluation, root finding, residue and expansion code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("evaluation at a pole of the moment generating function (z = {z})")]
    PoleEvaluation { z: Complex64 },

    #[error("point {z} is outside the domain of the model ({reason})")]
    OutOfDomain { z: Complex64, reason: &'static str },

    #[error("non-positive safety loading: {loading}")]
    NegativeLoading { loading: f64 },

    #[error("Lundberg equation has no finite positive root ({0})")]
    NoFiniteRoot(String),

    #[error("g - 1 vanishes on the contour boundary after {nudges} nudges")]
    BoundaryZero { nudges: usize },

    #[error("contour quadrature did not settle within {nodes} nodes")]
    QuadratureDivergence { nodes: usize },

    #[error("winding number {value} is not within tolerance of an integer")]
    NonIntegerWinding { value: f64 },

    #[error("could not resolve the multiplicity of a root cluster near {at}")]
    MultiplicityUnresolved { at: Complex64 },

    #[error("Newton iteration failed to converge near {at}")]
    NewtonFailure { at: Complex64 },

    #[error("root at {at} is not simple (multiplicity {multiplicity})")]
    NotSimple { at: Complex64, multiplicity: u32 },

    #[error("extra factor of the integrand vanishes at {at}")]
    DegenerateFactor { at: Complex64 },

    #[error("circle quadrature did not converge (last relative change {change:e})")]
    NoConvergence { change: f64 },

    #[error("pole at {at} is too close to another singularity (distance {distance:e})")]
    PoleTooClose { at: Complex64, distance: f64 },

    #[error("probability mass at zero is {0}, renewal recursion undefined")]
    MassAtZeroOne(f64),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
