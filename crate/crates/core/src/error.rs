use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("matrix side {size} exceeds the limit of {max} for this routine")]
    TooLarge { size: usize, max: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("positivity violated: {0}")]
    Positivity(String),

    #[error("expectation value has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("partial-transpose test inconclusive: {0}")]
    Inconclusive(String),

    #[error("constraints are infeasible (best residual {residual:e})")]
    Infeasible { residual: f64 },

    #[error("unsupported dimensions: {0}")]
    UnsupportedDims(String),

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("insufficient measurement settings: {0}")]
    InsufficientSettings(String),

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error("invalid scenario field `{field}`: {message}")]
    Scenario { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible { .. } => 3,
            Error::NonConvergence { .. } => 4,
            _ => 2,
        }
    }
}
