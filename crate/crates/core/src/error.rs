use core::fmt;

/// Errors raised by the kinetic core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Grid size must be a positive multiple of 4.
    InvalidGrid { n: usize },
    /// Two objects were built on different grids.
    GridMismatch { expected: usize, found: usize },
    /// A per-node array has the wrong length.
    LengthMismatch { expected: usize, found: usize },
    /// A mollifier or step parameter is out of range.
    InvalidParameter { name: &'static str, value: f64 },
    /// A function required to satisfy `g(k) = −g(½ − k)` does not.
    NotAntisymmetric { node: usize, defect: f64 },
    /// An accumulated operator that must be Hermitian is not.
    NonHermitian { node: usize, defect: f64 },
    /// Eigenvalues left `[0, 1]` beyond the audit tolerance.
    FermiViolation {
        node: usize,
        eigenvalue: f64,
        time: f64,
    },
    /// The stationary-state inverse problem has no interior solution.
    DegenerateInput { reason: &'static str },
    /// Newton iteration failed to reach tolerance.
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },
    /// The assembled Hessian lost positive definiteness.
    NotConvex { iteration: usize, pivot: f64 },
    /// Fit input is unusable.
    InvalidFit { reason: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid { n } => write!(f, "grid size {n} is not a positive multiple of 4"),
            Error::GridMismatch { expected, found } => {
                write!(f, "grid mismatch: expected n = {expected}, found n = {found}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::NotAntisymmetric { node, defect } => {
                write!(f, "function is not antisymmetric under k -> 1/2 - k at node {node} (defect {defect:e})")
            }
            Error::NonHermitian { node, defect } => {
                write!(f, "operator is not Hermitian at node {node} (defect {defect:e})")
            }
            Error::FermiViolation { node, eigenvalue, time } => write!(
                f,
                "Fermi property violated at node {node}, t = {time}: eigenvalue {eigenvalue}"
            ),
            Error::DegenerateInput { reason } => write!(f, "degenerate input: {reason}"),
            Error::NoConvergence { iterations, gradient_norm } => write!(
                f,
                "Newton iteration did not converge after {iterations} iterations (gradient {gradient_norm:e})"
            ),
            Error::NotConvex { iteration, pivot } => {
                write!(f, "Hessian not positive definite at iteration {iteration} (pivot {pivot:e})")
            }
            Error::InvalidFit { reason } => write!(f, "invalid fit input: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
