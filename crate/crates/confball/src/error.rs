//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative scheme exhausted its budget without reaching tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A root-finding bracket could not be established; the inputs are
    /// inconsistent (e.g. no root inside the admissible search interval).
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// A stated hypothesis of a closed-form bound does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Vector/matrix shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A model family violates its structural requirements.
    #[error("invalid model family: {0}")]
    Family(String),

    /// Subset enumeration would exceed the configured model-count cap.
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    /// A numeric text file could not be parsed; location is 1-based.
    #[error("parse error in {path} at row {row}, column {col}: {msg}")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        msg: String,
    },

    /// Malformed configuration file.
    #[error("config error in {path}: {msg}")]
    Config { path: String, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
