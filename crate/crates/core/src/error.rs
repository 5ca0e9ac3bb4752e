use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operands belong to different algebras (dimension {0} vs {1})")]
    MixedAlgebra(usize, usize),
    #[error("expected a unit element, got norm {0}")]
    NotUnit(f64),
    #[error("expected a purely imaginary element, real part {0}")]
    NotImaginary(f64),
    #[error("matrix is not orthogonal (|M^T M - I| = {0:e})")]
    NotOrthogonal(f64),
    #[error("matrix has determinant {0}; no rotor pair exists")]
    NegativeDeterminant(f64),
    #[error("frame is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error("(rho, sigma) do not determine a 2-plane: kernel singular values {0:?}")]
    InconsistentGaussPair(Vec<f64>),
    #[error("target is antipodal to the base point; supply a branch hint")]
    Antipodal,
    #[error("conjugated generator is not a left multiplication (defect {0:e}); element is not in Spin(7)")]
    NotInSpin7(f64),
    #[error("grid too small: {axis} axis has {n} points, at least 3 are required")]
    GridTooSmall { axis: char, n: usize },
    #[error("grid spacing must be positive, got hx={0}, hy={1}")]
    BadSpacing(f64, f64),
    #[error("map is not sphere valued: | |n| - 1 | = {0:e}")]
    OffSphere(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parametrization is not conformal: residual {0:e}")]
    NotConformal(f64),
    #[error("immersion degenerates: |X_x| = {0:e}")]
    Degenerate(f64),
    #[error("surface is not Lagrangian: residual {0:e}")]
    NotLagrangian(f64),
    #[error("surface does not lie in Im H: real part {0:e}")]
    NotInImH(f64),
    #[error("angle unwrapping found a branch jump of {jump} rad at grid point ({i}, {j})")]
    BranchJump { i: usize, j: usize, jump: f64 },
    #[error("spectral parameter lambda must be nonzero")]
    ZeroLambda,
    #[error("tau is not of order four (|tau^4 - Id| = {0:e})")]
    TauOrder(f64),
    #[error("unknown catalog entry '{name}'; available: {available}")]
    UnknownEntry { name: String, available: String },
    #[error("grid file shape mismatch: expected {expected} values, found {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("unsupported value dimension {0}; expected 3, 4 or 8")]
    UnsupportedDimension(usize),
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("generator budget exceeded: index {index} with {budget} generators")]
    GeneratorBudget { index: usize, budget: usize },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("element has no invertible body")]
    NotInvertible,
    #[error("integration produced non-finite values at step {0}")]
    NonFiniteStep(usize),
    #[error("need at least two grid levels, got {0}")]
    TooFewLevels(usize),
    #[error("odd field is not tangent to the sphere map: |<psi,u>| = {0:e}")]
    NotTangent(f64),
    #[error("io error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
