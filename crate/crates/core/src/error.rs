use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("shape mismatch at {location}: expected {expected}, found {found}")]
    ShapeMismatch {
        location: String,
        expected: usize,
        found: usize,
    },
    #[error("representation is not alternating")]
    NotAlternating,
    #[error("non-integral value {value} where an integer was required ({context})")]
    NonIntegral { value: String, context: String },
    #[error("not a group action: {0}")]
    NotAnAction(String),
    #[error("bracket of basis elements {0} and {1} leaves the integral span")]
    NotClosed(usize, usize),
    #[error("basis matrix {0} is not strictly upper triangular of the declared size")]
    NotNilpotentShape(usize),
    #[error("basis matrices are linearly dependent over the rationals")]
    LinearlyDependent,
    #[error("characteristic {p} is smaller than matrix size {n}")]
    CharTooSmall { p: u64, n: usize },
    #[error("denominator {0} has a factor coprime to q")]
    BadDenominator(String),
    #[error("need at least {needed} samples at distinct q, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("decomposition does not reproduce the point count at q = {q}: {lhs} != {rhs}")]
    DecompositionInvalid { q: u64, lhs: String, rhs: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
