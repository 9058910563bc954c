use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scatterers {0} and {1} coincide (distance below threshold)")]
    CoincidentScatterers(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("linear system is singular (condition estimate {0:e})")]
    SingularSystem(f64),
    #[error("eigensolver did not converge")]
    EigenFailure,
    #[error("Green matrix is not diagonalizable (defect score {0:e})")]
    NotDiagonalizable(f64),
    #[error("configuration is not collinear with the incident direction")]
    NotCollinear,
    #[error("objective is not finite on the initial simplex")]
    NonFiniteObjective,
    #[error("exclusion radius cannot be satisfied inside the sampling sphere")]
    InfeasibleExclusion,
    #[error("{failed} of {total} samples failed to evaluate")]
    ObjectiveFailure { failed: usize, total: usize },
    #[error("no reference entry for N={0} and the requested family")]
    NotAvailable(usize),
    #[error("least-squares fit is degenerate")]
    DegenerateFit,
}
