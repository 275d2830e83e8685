use thiserror::Error;

/// Everything that can go wrong in the calculator.
///
/// The CLI maps these onto exit codes through [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice mismatch: genus {left} vs genus {right}")]
    LatticeMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symplectic with respect to the standard intersection form")]
    NotSymplectic,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("monomial U^{u_power} with {wedge_degree} wedge factors leaves the range i + |S| <= {n}; the truncation relation is not available")]
    RelationNeeded {
        u_power: u32,
        wedge_degree: usize,
        n: u32,
    },

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("operation requires genus {expected}, got {actual}")]
    GenusMismatch { expected: usize, actual: usize },

    #[error("circle class {0} is neither primitive nor zero")]
    NotPrimitive(String),

    #[error("no symmetric product below Sym^0")]
    NoTarget,

    #[error("Morse cycle does not close: {0}")]
    NonClosingCycle(String),

    #[error("characteristic polynomial is not palindromic")]
    NonPalindromic,

    #[error("inconsistent descriptor: {0}")]
    Inconsistent(String),

    #[error("inadmissible: {0}")]
    Inadmissible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate endpoint: det(I - M_end) vanishes (|det| = {0:e})")]
    DegenerateEndpoint(f64),

    #[error("sampling resolution too coarse: {0}")]
    Resolution(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("unknown example '{name}'; available: {available}")]
    UnknownExample { name: String, available: String },
}

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::UnknownExample { .. } | Error::InvalidParameter(_) => 2,
            Error::Resolution(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
