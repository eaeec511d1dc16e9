use thiserror::Error;

/// Errors raised by the structure constructors and pointwise operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grade {grade} exceeds ambient dimension {dim}")]
    GradeOverflow { grade: usize, dim: usize },

    #[error("grade mismatch: expected {expected}, found {found}")]
    GradeMismatch { expected: usize, found: usize },

    #[error("unsupported ambient dimension {0} (must be 1..=12)")]
    UnsupportedDimension(usize),

    #[error("index set {0:?} is not strictly increasing within 1..=dim")]
    InvalidIndex(Vec<usize>),

    #[error("frame is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("wrong number of arguments: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("octonion argument has nonzero real part {0:e}")]
    NotImaginary(f64),

    #[error("zero vector where a unit vector is required")]
    ZeroVector,

    #[error("structure kind mismatch: {0}")]
    KindMismatch(String),

    #[error("matrix is not an orthogonal involution (residual {residual:e})")]
    NotInvolution { residual: f64 },

    #[error("vector at vertex {vertex} is not normal to the knot (residual {residual:e})")]
    NotNormal { vertex: usize, residual: f64 },

    #[error("covector is not normal to the plane (residual {residual:e})")]
    NotNormalToPlane { residual: f64 },

    #[error("plane is not a brane: {0}")]
    NotBrane(String),

    #[error("polynomial coefficient degree {0} is not supported (max 1)")]
    UnsupportedDegree(usize),

    #[error("knot is not isotropic (residual {0:e})")]
    NotIsotropic(f64),

    #[error("quotient fiber has rank {found}, expected {expected} at vertex {vertex}")]
    RankDefect {
        vertex: usize,
        expected: usize,
        found: usize,
    },

    #[error("knot is not contained in the plane (residual {0:e})")]
    NotContained(f64),

    #[error("vector field and Hamiltonian form do not match (residual {0:e})")]
    InvalidHamiltonianPair(f64),

    #[error("knot has no connectivity; deformation needs a cycle or triangle mesh")]
    MissingTopology,

    #[error("knot dimension s = {s} does not match the fold r = {r} (need s = r - 1)")]
    FoldMismatch { s: usize, r: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
