use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate geometry at atom {site}: {what}")]
    DegenerateGeometry { site: usize, what: &'static str },
    #[error("reduced point ({x}, {z}) outside the admissible domain")]
    DomainViolation { x: f64, z: f64 },
    #[error("symmetric orbit has coincident points")]
    DuplicateOrbitPoint,
    #[error("{what} did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { what: &'static str, iters: usize, residual: f64 },
    #[error("eigencluster {cluster} has ambiguous isotypical label")]
    ClusterAmbiguity { cluster: usize },
    #[error("cluster {cluster}: multiplicity {found} does not match label {label}")]
    MultiplicityMismatch { cluster: usize, found: usize, label: i32 },
    #[error("unsupported product: {0}")]
    UnsupportedPair(String),
    #[error("resonance: {0}")]
    ResonanceDetected(String),
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("seed has empty fixed space for orbit type {0}")]
    EmptyFixedSpace(String),
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("continuation step failed after {halvings} halvings")]
    StepFailure { halvings: usize },
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("unknown orbit type {0}")]
    UnknownOrbitType(String),
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
