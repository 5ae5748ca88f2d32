use thiserror::Error;

pub type Result<T> = std::result::Result<T, CascadeError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CascadeError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("time ordering violated: tau = {tau} < 0")]
    Ordering { tau: f64 },

    #[error("degenerate detection gate: {0}")]
    DegenerateGate(String),

    #[error("numerical validity check failed: {0}")]
    NumericalValidity(String),

    #[error("matrix is not of X form: {0}")]
    Form(String),
}

impl CascadeError {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            CascadeError::Parameter(_)
                | CascadeError::Dimension(_)
                | CascadeError::Ordering { .. }
                | CascadeError::Form(_)
        )
    }
}
