use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("malformed matrix: {0}")]
    Malformed(String),

    #[error("scalar {re}{im:+}j is not in {{±1, ±j}}; convert to float mode first")]
    NonUnitScalar { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("code is not single-symbol decodable: {0}")]
    NotSsd(String),

    #[error("expected {expected} symbols, got {got}")]
    SymbolCount { expected: usize, got: usize },

    #[error("search needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: f64, budget: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
