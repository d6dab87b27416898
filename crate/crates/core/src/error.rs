use thiserror::Error;

/// Errors raised by the GMF library.
///
/// Infinite support or gauge values are regular results (see
/// [`crate::ExtendedReal`]), never errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GmfError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(
        "infeasible constraint pair: rge B is not contained in rge A (residual {residual:.3e})"
    )]
    Infeasible { residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid tolerance: {0}")]
    Tolerance(String),
}

impl GmfError {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        GmfError::Dimension(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, GmfError>;
