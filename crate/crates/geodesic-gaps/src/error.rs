use thiserror::Error;

/// Errors across the spectrum and graph modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation's precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A certified comparison or bound could not be established at the
    /// available precision or digit budget.
    #[error("certification failed: {0}")]
    Certification(String),

    /// Malformed external input (graph files, digit streams, decimals).
    #[error("invalid input: {0}")]
    Parse(String),

    /// A built-in verification that must never fail did; indicates a bug.
    #[error("internal verification failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
