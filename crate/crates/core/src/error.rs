use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A ballot that is not a permutation of the candidates.
    #[error("vote {index} is invalid: {reason}")]
    InvalidVote { index: usize, reason: String },

    #[error("invalid election: {0}")]
    InvalidElection(String),

    #[error("invalid score profile: {0}")]
    InvalidProfile(String),

    /// A manipulator vote matrix or column matrix breaks its structural invariants.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Should be unreachable on valid input; signals a bug.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("csv schema mismatch: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
