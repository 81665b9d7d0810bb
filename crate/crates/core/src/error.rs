use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand sizes do not agree.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    /// An argument lies outside its admissible range.
    InvalidArgument(&'static str),
    /// A Cholesky pivot was not strictly positive.
    NotPositiveDefinite { pivot: usize, value: f64 },
    /// An LU pivot vanished (relative to the matrix scale).
    SingularPivot { pivot: usize },
    /// An iterative solver hit its iteration cap.
    NotConverged { iterations: usize, relative_residual: f64 },
    DegenerateTriangle { triangle: usize, area: f64 },
    DegenerateEdge { edge: usize },
    /// A time step does not divide the requested horizon or output grid.
    IncommensurateStep { step: f64, span: f64 },
    /// The kinetic trace constraint `u2 = p` was violated.
    ConstraintViolation { step: usize, max_deviation: f64 },
    /// Error or step-size data unusable for an order fit.
    InvalidErrorData(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { context, expected, found } => {
                write!(f, "dimension mismatch in {context}: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NotPositiveDefinite { pivot, value } => {
                write!(f, "matrix not positive definite (pivot {pivot} = {value:e})")
            }
            Error::SingularPivot { pivot } => write!(f, "zero pivot at row {pivot}"),
            Error::NotConverged { iterations, relative_residual } => write!(
                f,
                "iterative solver did not converge in {iterations} iterations (relative residual {relative_residual:e})"
            ),
            Error::DegenerateTriangle { triangle, area } => {
                write!(f, "triangle {triangle} is degenerate (area {area:e})")
            }
            Error::DegenerateEdge { edge } => write!(f, "boundary edge {edge} has zero length"),
            Error::IncommensurateStep { step, span } => {
                write!(f, "step {step} does not divide {span}")
            }
            Error::ConstraintViolation { step, max_deviation } => {
                write!(f, "trace constraint violated at step {step} (max |u2 - p| = {max_deviation:e})")
            }
            Error::InvalidErrorData(msg) => write!(f, "invalid error data: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { context, expected, found })
    }
}
