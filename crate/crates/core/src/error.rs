use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: truncation needs at least 2 levels")]
    InvalidDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("truncation overflow: retained fraction {retained:.9} below 1 - {tol:.1e} at dim {dim}")]
    TruncationOverflow { dim: usize, retained: f64, tol: f64 },

    #[error("truncation not converged: {what} changed by {delta:.3e} between dim {dim} and {dim2} (tol {tol:.1e})")]
    TruncationNotConverged {
        what: String,
        dim: usize,
        dim2: usize,
        delta: f64,
        tol: f64,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("comb not converged: adding a peak changed the state by {0:.3e}")]
    CombNotConverged(f64),

    #[error("projection annihilated the state (probability {0:.3e})")]
    ProjectionAnnihilated(f64),

    #[error("post-selection annihilated the state (branch probability {0:.3e})")]
    PostselectAnnihilated(f64),

    #[error("quadrature not converged: probability changed by {0:.3e} on doubling nodes")]
    QuadratureNotConverged(f64),

    #[error("step control failed: {0}")]
    StepControl(String),

    #[error("denominator indistinguishable from zero: mean {mean:.3e}, stderr {stderr:.3e}")]
    DenominatorDegenerate { mean: f64, stderr: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite, got {x}")))
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::InvalidDimension(dim))
    } else {
        Ok(())
    }
}
