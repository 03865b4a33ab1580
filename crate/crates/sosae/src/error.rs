//! Crate-wide error type.
//!
//! Every fallible public operation returns [`Result`]. The variants map onto
//! the CLI exit codes: [`Error::Config`] is a configuration problem (exit 1),
//! everything else is a runtime failure (exit 2); partial multi-model
//! failures are reported separately by the pipeline runners.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Incompatible matrix/vector shapes, e.g. a matmul of 3x4 by 5x2.
    #[error("shape mismatch in {op}: {left} vs {right}")]
    Shape {
        op: &'static str,
        left: String,
        right: String,
    },

    /// A value violates a documented precondition (negative rate, k out of
    /// range, empty candidate list, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A binary file does not conform to its declared format (IDX data,
    /// model checkpoints).
    #[error("format error in {path}: {msg}")]
    Format { path: String, msg: String },

    /// A config file failed to parse or validate; `line` is 1-based.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// Training produced a non-finite loss.
    #[error("training diverged at epoch {epoch}: {msg}")]
    Divergence { epoch: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Error {
        Error::Argument(msg.into())
    }

    pub(crate) fn shape(op: &'static str, left: impl Into<String>, right: impl Into<String>) -> Error {
        Error::Shape {
            op,
            left: left.into(),
            right: right.into(),
        }
    }
}
