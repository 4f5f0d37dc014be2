use thiserror::Error;

/// Library-wide error type. The CLI maps these onto process exit codes:
/// input problems (parse, validation, bad arguments) exit 2, an infeasible
/// deadline exits 3, everything else exits 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Graph construction failed; one message per violated invariant.
    #[error("invalid task graph:\n{}", .0.join("\n"))]
    InvalidGraph(Vec<String>),

    /// No assignment within the scanned windows can meet the deadline.
    #[error("deadline cannot be met")]
    DeadlineInfeasible,

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
