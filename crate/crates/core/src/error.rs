use thiserror::Error;

/// Errors raised by every operation in this crate.
///
/// Variants carry the offending indices or spectra so callers can report
/// precisely what went wrong.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty input: at least one point is required")]
    Empty,

    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("matrix is not symmetric at ({i}, {j}): {a} != {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("nonzero diagonal entry at index {i}: {value}")]
    NonzeroDiagonal { i: usize, value: f64 },

    #[error("non-positive distance between distinct points ({i}, {j}): {value}")]
    NonpositiveOffDiagonal { i: usize, j: usize, value: f64 },

    #[error("triangle inequality violated: d({i},{j}) = {direct} > d({i},{k}) + d({k},{j}) = {detour}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        detour: f64,
    },

    #[error("points {i} and {j} coincide")]
    DuplicatePoints { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("weights do not split into a +1 / -1 partition (positive sum {positive}, negative sum {negative})")]
    BadPartition { positive: f64, negative: f64 },

    #[error("weights do not sum to zero (sum = {sum})")]
    BadWeights { sum: f64 },

    #[error("metric is not of negative type: eigenvalue {eigenvalue} on the sum-zero subspace")]
    NotEmbeddable { eigenvalue: f64, witness: Vec<f64> },

    #[error("negative-type inequality is not strict: smallest eigenvalue {min_eigenvalue}")]
    NotStrict {
        min_eigenvalue: f64,
        witness: Vec<f64>,
    },

    #[error("rank deficit: expected rank {expected}, found {found}")]
    TheoremViolation {
        expected: usize,
        found: usize,
        spectrum: Vec<f64>,
    },

    #[error("embedding residual {residual} exceeds {limit}")]
    ResidualExceeded { residual: f64, limit: f64 },

    #[error("quadrature did not converge within {subdivisions} subdivisions (error estimate {error_estimate})")]
    QuadratureNonconvergence {
        subdivisions: usize,
        error_estimate: f64,
    },

    #[error("matrix {index} is not orthogonal (defect {defect})")]
    NotOrthogonal { index: usize, defect: f64 },

    #[error("group closure exceeded {max_order} elements")]
    OrderExceeded { max_order: usize },

    #[error("two group elements differ by {distance}, inside the ambiguity band of tolerance {tol}")]
    NumericalAmbiguity { distance: f64, tol: f64 },

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("orbit {orbit} is not free: elements {g} and {h} give the same point")]
    NonFreeOrbit { orbit: usize, g: usize, h: usize },

    #[error("representatives {first} and {second} lie in the same orbit")]
    OrbitCollision { first: usize, second: usize },

    #[error("induced scalar product is not group invariant (defect {defect})")]
    InvarianceViolation { defect: f64 },

    #[error("quotient distances not reproduced: max abs error {max_abs_error} exceeds {limit}")]
    VerificationFailure {
        max_abs_error: f64,
        limit: f64,
        report: Vec<crate::quotient::PairReport>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
