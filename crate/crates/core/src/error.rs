use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("circle passes through the origin, its inversion is a line")]
    PuncturedCircle,
    #[error("invalid moduli point: {0}")]
    InvalidModuli(&'static str),
    #[error("invalid circular domain: {0}")]
    InvalidDomain(&'static str),
    #[error("zero argument")]
    ZeroArgument,
    #[error("argument {0} is too close to a zero of theta1")]
    NearZero(Complex64),
    #[error("evaluation point {0} hits the pole")]
    PoleHit(Complex64),
    #[error("point {0} lies outside the closed annulus")]
    OutOfAnnulus(Complex64),
    #[error("coincident points")]
    CoincidentPoints,
    #[error("index {index} out of range (expected 1..={max})")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("harmonic solver residual {0:e} above tolerance")]
    SolverFailure(f64),
    #[error("period matrix is singular")]
    SingularMatrix,
    #[error("slit map solver ill-conditioned, residual {residual:e} at degree {degree}")]
    IllConditioned { residual: f64, degree: usize },
    #[error("|F'/G'| = {ratio} >= 1 at {at}")]
    ContractionViolated { ratio: f64, at: Complex64 },
    #[error("no admissible integration path to {0}")]
    PathRoutingFailed(Complex64),
    #[error("newton inversion did not converge, last residual {0:e}")]
    NoConvergence(f64),
    #[error("target lies on a singular point of the graph")]
    SingularityTarget,
    #[error("boundary image of circle {circle} is not a point, spread {spread:e}")]
    NotConstantOnBoundary { circle: usize, spread: f64 },
    #[error("degenerate planar jacobian {0:e}")]
    DegenerateJacobian(f64),
    #[error("linear part has determinant {0}, expected 1")]
    NotUnimodular(f64),
    #[error("finite-difference step {0} outside [1e-5, 1e-2]")]
    InvalidStep(f64),
    #[error("point {0} is outside the domain")]
    OutsideDomain(Complex64),
}
