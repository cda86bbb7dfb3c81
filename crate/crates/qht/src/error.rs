use thiserror::Error;

/// Errors from state validation, spectral routines, and the test solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("not Hermitian: max |m[i][j] - conj(m[j][i])| = {deviation:e} exceeds {tol:e}")]
    NonHermitian { deviation: f64, tol: f64 },

    #[error("eigendecomposition did not converge within {max_iter} iterations")]
    ConvergenceFailure { max_iter: usize },

    #[error("trace is {0}, expected 1 within 1e-10")]
    InvalidTrace(f64),

    #[error("not positive semidefinite: min eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("eigen-reconstruction error {0:e} exceeds 1e-9")]
    ReconstructionFailure(f64),

    #[error("negative matrix power of a singular density: min eigenvalue {0:e}")]
    SingularPower(f64),

    #[error("eta is singular: min eigenvalue {0:e} below 1e-12")]
    EtaSingular(f64),

    #[error("density is singular: min eigenvalue {0:e} below 1e-12")]
    SingularDensity(f64),

    #[error("alpha = {0} outside the supported range (1, 1e6]")]
    AlphaOutOfRange(f64),

    #[error("tolerance {0} outside (0, 1e-2]")]
    TolOutOfRange(f64),

    #[error("kappa = {0} outside (0, 1)")]
    KappaOutOfRange(f64),

    #[error("DenseCapExceeded: dense dimension {dim} exceeds cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("TypeCapExceeded: enumeration would produce {count:e} compositions, cap is {cap}")]
    TypeCapExceeded { count: f64, cap: usize },

    #[error("test spectrum [{min:e}, {max:e}] escapes [0, 1]")]
    TestSpectrum { min: f64, max: f64 },

    #[error("log scale factor {0} is positive")]
    PositiveLogFactor(f64),

    #[error("bad block-test parameters: n0 = {n0}, n = {n}, r = {r}")]
    BadBlockParams { n0: usize, n: usize, r: f64 },

    #[error("bisection interval shrank below 1e-14 without a certificate")]
    BisectionFailure,

    #[error("operators do not commute: commutator norm {0:e}")]
    NotCommuting(f64),

    #[error("order precondition eta <= e^s * eta_tilde fails")]
    OrderViolation,

    #[error("need at least 3 exponent records, got {0}")]
    InsufficientData(usize),

    #[error("invalid probability vector: {0}")]
    BadDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pair file {path}: {reason}")]
    PairFile { path: String, reason: String },

    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },

    #[error("rate r = {0} must be nonnegative")]
    NegativeRate(f64),

    #[error("budget exp({0}) exceeds 1")]
    BudgetAboveOne(f64),
}

impl Error {
    /// Process exit code contract: 1 input/validation, 2 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotSquare { .. }
            | Error::DimMismatch(..)
            | Error::NonHermitian { .. }
            | Error::InvalidTrace(..)
            | Error::NotPositive(..)
            | Error::AlphaOutOfRange(..)
            | Error::TolOutOfRange(..)
            | Error::KappaOutOfRange(..)
            | Error::PositiveLogFactor(..)
            | Error::BadBlockParams { .. }
            | Error::InsufficientData(..)
            | Error::BadDistribution(..)
            | Error::InvalidArgument(..)
            | Error::PairFile { .. }
            | Error::Io { .. }
            | Error::NegativeRate(..)
            | Error::BudgetAboveOne(..) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
