use std::fmt;

/// Errors shared across the solver and generator modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Closing the given pairs would require a candidate to precede itself,
    /// directly or through a cycle.
    Cycle { a: usize, b: usize },
    /// An enumeration exceeded its node budget.
    BudgetExceeded { budget: u64 },
    /// A margin target entry is odd where the construction needs even values.
    Parity { a: usize, b: usize, value: i64 },
    /// A generator could not realize its post-condition.
    Infeasible(String),
    /// An input is outside the supported brute-force scope.
    Scope(String),
    /// A solver was called with parameters it does not support.
    Parameter(String),
    /// Inconsistent dimensions between a score vector and a candidate set.
    Dimension { expected: usize, got: usize },
    /// More candidates than the bitmask representation supports.
    TooManyCandidates { m: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Cycle { a, b } => {
                write!(f, "cycle: both {a} > {b} and {b} > {a} would be required")
            }
            Error::BudgetExceeded { budget } => {
                write!(f, "enumeration budget of {budget} nodes exceeded")
            }
            Error::Parity { a, b, value } => {
                write!(f, "margin target ({a},{b}) = {value} is odd")
            }
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::Scope(msg) => write!(f, "out of brute-force scope: {msg}"),
            Error::Parameter(msg) => write!(f, "bad parameter: {msg}"),
            Error::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::TooManyCandidates { m } => {
                write!(f, "{m} candidates exceed the supported maximum of 64")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
