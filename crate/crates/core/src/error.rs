use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A stencil or evaluation point fell outside a curve's domain.
    #[error("point {point} outside curve domain [{lo}, {hi}]")]
    Domain { point: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The constraint residual is (numerically) identically zero, so no
    /// multiplier can be estimated.
    #[error("degenerate constraint: sum of squared constraint residuals {0:e} below tolerance")]
    DegenerateConstraint(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        param(format!("eps must be positive and finite, got {eps}"))
    }
}
