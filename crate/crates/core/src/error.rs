use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("malformed sample encoding: {0}")]
    InvalidEncoding(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("cannot seat {players} players on {chairs} chairs")]
    Infeasible { players: usize, chairs: usize },

    #[error("enumeration of {required} items exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("not a rejection of this sample: {0}")]
    NotARejection(String),

    #[error("sample does not match the pattern")]
    NotAMatch,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("no preimage: {0}")]
    NoPreimage(String),
}
