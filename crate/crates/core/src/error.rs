use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("entry count {got} does not match {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, got: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian within tolerance (max |A - A^H| = {violation:e}, tol = {tol:e})")]
    NotHermitianWithinTol { violation: f64, tol: f64 },

    #[error("eigensolver did not converge within its iteration budget")]
    ConvergenceFailure,

    #[error("operator is not positive (min eigenvalue {min_eigenvalue:e} < -{rank_tol:e})")]
    NotPositive { min_eigenvalue: f64, rank_tol: f64 },

    #[error("operator is singular (min eigenvalue {min_eigenvalue:e} <= {rank_tol:e})")]
    SingularInput { min_eigenvalue: f64, rank_tol: f64 },

    #[error("matrix exponential overflowed")]
    Overflow,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("reference operator rho is zero")]
    ZeroRho,

    #[error("operator is zero")]
    ZeroOperator,

    #[error("rho and sigma are mutually singular")]
    MutuallySingular,

    #[error("rho is not absolutely continuous with respect to sigma (min excision eigenvalue {min_eigenvalue:e})")]
    NotAbsolutelyContinuous { min_eigenvalue: f64 },

    #[error("derivative has weight {magnitude:e} on the null block of rho at entry ({row}, {col})")]
    DerivativeLeavesSupport { row: usize, col: usize, magnitude: f64 },

    #[error("finite-difference derivative unstable (Richardson levels differ by {discrepancy:e})")]
    NumericalDerivativeUnstable { discrepancy: f64 },

    #[error("observable {index} is not centered: Tr rho B = {value:e}")]
    NotCentered { index: usize, value: f64 },

    #[error("support violation at n = {n}, theta = {theta:?}: rho_theta >> rho_theta0 fails")]
    SupportViolation { n: usize, theta: Vec<f64> },

    #[error("tensor dimension {dim} exceeds the brute-force limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("per-site trace {value} too far from 1 (|z - 1| = {distance} >= {bound})")]
    QueryOutOfSafeRange { value: num_complex::Complex64, distance: f64, bound: f64 },

    #[error("invalid ranks: rank_rho = {rank_rho}, rank_sigma = {rank_sigma}, dim = {dim}")]
    InvalidRanks { rank_rho: usize, rank_sigma: usize, dim: usize },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("theta {0:?} is not a grid point of the tabulated model")]
    ThetaNotOnGrid(Vec<f64>),

    #[error("unknown model {0:?}")]
    UnknownModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
