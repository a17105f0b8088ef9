use thiserror::Error;

/// Crate-wide error type. The CLI maps these onto process exit codes, so
/// constructors should pick the variant by failure class, not by module.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad user input: mismatched lengths, invalid flag combinations,
    /// malformed files.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A dense-path or enumeration size guard was exceeded.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    /// Numerical integrity violation: negative probabilities beyond the
    /// roundoff floor, non-finite tensors, gauge-mismatched null spaces.
    #[error("numerical integrity violation: {0}")]
    Integrity(String),

    /// Every optimization restart diverged or degenerated.
    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI (0 = success, 1 = other).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Serde(_) => 2,
            Error::SizeGuard(_) => 3,
            Error::Integrity(_) => 4,
            Error::Optimization(_) => 5,
            Error::Io(_) => 1,
        }
    }
}
