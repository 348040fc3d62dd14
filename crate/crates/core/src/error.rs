use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the holonomy kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is rank deficient: smallest singular value {sigma_min:e}, largest {sigma_max:e}")]
    RankDeficient { sigma_min: f64, sigma_max: f64 },

    #[error("overlap matrix of link {link} is rank deficient (singular values {singular_values:?})")]
    LinkRankDeficient { link: usize, singular_values: Vec<f64> },

    #[error("polar phase of a zero complex number")]
    ZeroInput,

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("right-hand side is not anti-Hermitian (residual {residual:e})")]
    NotAntiHermitian { residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error("path has no samples")]
    EmptyPath,

    #[error("path parameter is not strictly increasing at sample {index}")]
    NonMonotoneGrid { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("no Kraus operators given")]
    EmptyRep,

    #[error("channel sequence is empty")]
    EmptySequence,

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("cannot build {k} independent Kraus operators on dimension {dim}")]
    BadArity { dim: usize, k: usize },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("parameter `{name}` = {value} is out of range")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("wrong number of parameters for `{name}`: expected {expected}, found {found}")]
    ParamCount { name: &'static str, expected: usize, found: usize },

    #[error("derivative of the path is unavailable at s = {s}")]
    DerivativeUnavailable { s: f64 },

    #[error("|x| = 1, the overlap matrix is singular")]
    XNormOne,

    #[error("Schroedinger integration failed (unitarity defect {defect:e})")]
    IntegratorFailure { defect: f64 },

    #[error("Kraus number {k} is not maximal for dimension {dim}")]
    NotMaximalKraus { dim: usize, k: usize },

    #[error("basis is not orthonormal (residual {residual:e})")]
    BadBasis { residual: f64 },

    #[error("amplitude sequence is not cyclic")]
    NotCyclic,

    #[error("density operator {index} is not faithful (smallest eigenvalue {min_eigenvalue:e})")]
    NotFaithful { index: usize, min_eigenvalue: f64 },

    #[error("amplitude {index} does not reproduce its density operator (residual {residual:e})")]
    AmplitudeMismatch { index: usize, residual: f64 },

    #[error("frame of block {block} is discontinuous near s = {s}")]
    FrameDiscontinuity { block: usize, s: f64 },

    #[error("Wilson line trace of block {block} vanishes")]
    VanishingTrace { block: usize },

    #[error("could not complete the isometry to a unitary")]
    CompletionFailure,

    #[error("circuit and closed-form detection probabilities disagree by {difference:e}")]
    CircuitMismatch { difference: f64 },

    #[error("gluing matrix violates C C^dagger <= I (largest eigenvalue {max_eigenvalue})")]
    GluingBound { max_eigenvalue: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
