use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate shape: {0}")]
    DegenerateShape(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    /// A line touches the boundary tangentially or runs through a corner.
    #[error("grazing ray at offset {offset}")]
    Grazing { offset: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("grid under-resolves the kernel: {ratio:.2} points per period (need >= {required})")]
    Resolution { ratio: f64, required: f64 },

    #[error("memory guard: {rows} rows exceed the configured budget of {limit}")]
    MemoryGuard { rows: usize, limit: usize },

    #[error("non-integrable endpoint behaviour: {0}")]
    NonIntegrable(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 3 for numerical convergence
    /// problems, 2 for everything that is a violated precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence(_) | Error::NonIntegrable(_) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
