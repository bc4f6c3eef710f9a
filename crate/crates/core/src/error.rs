use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building, validating or transforming
/// games and strategies. Magnitudes are reported in `f64` regardless of the
/// working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("matrix is not self-adjoint (max |M - M*| entry {0:e})")]
    NotSelfAdjoint(f64),

    #[error("trace-norm condition violated: ||M||_1 = {value} but {requirement}")]
    TraceNorm { value: f64, requirement: &'static str },

    #[error("outcome probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("outcome {index} has invalid probability {p}")]
    Probability { index: usize, p: f64 },

    #[error("outcome state {index} has norm {norm}, expected 1")]
    NonUnitState { index: usize, norm: f64 },

    #[error("outcome states {first} and {second} are not orthogonal (|<a,b>| = {overlap:e})")]
    NonOrthogonal { first: usize, second: usize, overlap: f64 },

    #[error("{which} is not unitary (max |A*A - I| entry {violation:e})")]
    NotUnitary { which: &'static str, violation: f64 },

    #[error("shared state has norm {0}, expected 1")]
    NotUnitVector(f64),

    #[error("commuting-model violation: max |[U_ij, V_kl]| entry {0:e}")]
    Commutation(f64),

    #[error("operator norm {0} exceeds 1; not a contraction")]
    NotContraction(f64),

    #[error("correlation does not have the corner-block embedding pattern (deviation {0:e})")]
    NotAnEmbedding(f64),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("decomposition failed: {0}")]
    Decomposition(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input parsed but violates a mathematical requirement.
    Validation,
    /// Unreadable, unwritable or malformed input.
    Input,
    /// A numerical routine failed on valid input.
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::Io(_) => ErrorKind::Input,
            Error::Decomposition(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }
}
