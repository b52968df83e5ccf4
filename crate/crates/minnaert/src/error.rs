//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh topology: {0}")]
    Topology(String),

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    /// Singular or hopelessly ill-conditioned linear algebra.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A parameter regime the implemented formulas do not cover
    /// (e.g. an overdamped oscillator, or a violated positivity condition).
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("resolution too low: {0}")]
    Resolution(String),

    #[error("stability: {0}")]
    Stability(String),

    #[error("receiver coincides with the bubble center: {0}")]
    SingularReceiver(String),

    #[error("no signal: {0}")]
    NoSignal(String),

    #[error("insufficient ringing: {0}")]
    InsufficientRinging(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit status the CLI maps this error to: 2 for configuration problems,
    /// 3 for numerical failures at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::Io(_) | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
