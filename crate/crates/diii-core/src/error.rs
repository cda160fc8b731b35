//! Crate-wide error type.
//!
//! Operations across modules compose freely (invariants call into the
//! linear-algebra and sewing layers), so a single enum keeps propagation
//! simple. Variants carry the residual or count that triggered them.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    // linear algebra
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("singular input: smallest singular value {0:.3e} below tolerance (gapless sample)")]
    SingularInput(f64),
    #[error("operation requires even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric (residual {0:.3e})")]
    NotSkewSymmetric(f64),
    #[error("matrix is not a skew-symmetric unitary (skew residual {skew:.3e}, unitarity residual {unitary:.3e})")]
    NotSkewUnitary { skew: f64, unitary: f64 },
    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("factorization did not converge: {0}")]
    NoConvergence(String),
    #[error("non-finite entry in matrix data")]
    NonFinite,

    // symmetry algebra
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("total dimension {0} must be even for class DIII")]
    OddTotalDimension(usize),
    #[error("chiral eigenspaces have unequal dimensions ({plus} vs {minus})")]
    UnequalChiralEigenspaces { plus: usize, minus: usize },
    #[error("symmetry relation `{relation}` violated (residual {residual:.3e})")]
    SymmetryViolation {
        relation: &'static str,
        residual: f64,
    },
    #[error(
        "unitary is not in the commutant of (chi, T) (chi residual {chi:.3e}, T residual {t:.3e})"
    )]
    NotInCommutant { chi: f64, t: f64 },
    #[error(
        "Hamiltonian field is not in the standard representation (diagonal-block residual {0:.3e})"
    )]
    NotStandardForm(f64),
    #[error("sewing condition violated (max residual {0:.3e})")]
    SewingViolation(f64),
    #[error("sewing matrix rank {0} must be even")]
    OddSewingRank(usize),

    // grids
    #[error("grid size {0} must be even so that k = pi is a grid point")]
    OddN(usize),
    #[error("grid size {0} too small, need at least 4")]
    TooSmall(usize),
    #[error("grid mismatch between fields")]
    GridMismatch,

    // phase tracking
    #[error("grid too coarse for phase unwrapping at index {index} (step {step:.3e} rad)")]
    GridTooCoarse { index: usize, step: f64 },
    #[error("start value does not square to the field base value (residual {0:.3e})")]
    BadStartValue(f64),
    #[error(
        "determinant field has nonzero winding ({n1}, {n2}); not an invariant sewing determinant"
    )]
    NonzeroWinding { n1: i64, n2: i64 },
    #[error("inconsistent 2d unwrap (max plaquette residual {0:.3e})")]
    InconsistentUnwrap(f64),
    #[error("field is not equivariant (residual {0:.3e})")]
    NotEquivariant(f64),
    #[error("cross-check failed: {0}")]
    CrossCheckFailure(String),

    // invariants
    #[error("value is {0:.3e} away from the nearest sign, not +/-1-like")]
    NotSignLike(f64),
    #[error("sewing fields have different ranks ({a} vs {b})")]
    RankMismatch { a: usize, b: usize },
    #[error("determinant field has nonzero winding {0}; sewing invariance violated")]
    NonzeroDetWinding(i64),

    // Toeplitz
    #[error("bandwidth {w} too large for grid of {n} points")]
    BandwidthTooLarge { w: usize, n: usize },
    #[error("finite-section kernel count did not stabilize: {0:?}")]
    Unstable(Vec<(usize, usize)>),

    // model zoo
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}
