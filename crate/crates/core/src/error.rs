use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The right-hand side is not in the range of the system matrix.
    #[error("right-hand side lies outside the range of the system (relative residual {residual:.3e})")]
    Range { residual: f64 },

    #[error("linear solver did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("weights decreased at coordinate {index} ({old} -> {new})")]
    NonMonotone { index: usize, old: f64, new: f64 },

    #[error("iteration cap of {0} exceeded")]
    IterationCapExceeded(usize),

    #[error("degenerate dual certificate: A^T phi = 0 while b^T phi = {0}")]
    DegenerateCertificate(f64),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("enumeration needs {bases} candidate bases, budget is {budget}")]
    TooLarge { bases: u128, budget: u128 },

    #[error("no basic feasible solution exists")]
    Infeasible,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("b does not lie in the column span of A")]
    Span,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::DimensionMismatch(format!(
            "{what} has length {got}, expected {expected}"
        )));
    }
    Ok(())
}
