use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: String, modulus: String },

    #[error("factorization out of budget: {bits}-bit input exceeds the {max_bits}-bit guard")]
    FactorBudget { bits: u64, max_bits: u32 },

    #[error("size guard exceeded: {0}")]
    Budget(String),

    #[error("level mismatch: {0} vs {1}; refine to a common level first")]
    LevelMismatch(usize, usize),

    #[error("resolution exhausted: cylinder word is empty")]
    ResolutionExhausted,

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::FactorBudget { .. } | Error::Budget(_) => 3,
            Error::Verification(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
