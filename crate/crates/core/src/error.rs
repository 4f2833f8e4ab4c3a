use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    InvalidArgument(&'static str),
    /// `log_gamma` evaluated at a non-positive integer.
    Pole,
    /// The spectral variable lies outside the domain of the requested route.
    Domain(&'static str),
    /// The caller broke a documented precondition (missing decay bound,
    /// self-reciprocity not satisfied, ...).
    Contract(&'static str),
    /// A linear-algebra kernel failed (no convergence, non-positive pivot).
    Numeric(&'static str),
    /// A computed residual exceeded its tolerance.
    Accuracy {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::Pole => f.write_str("pole of the Gamma function"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Contract(m) => write!(f, "contract violated: {m}"),
            Error::Numeric(m) => write!(f, "numerical failure: {m}"),
            Error::Accuracy {
                what,
                residual,
                tolerance,
            } => write!(
                f,
                "{what}: residual {residual:e} exceeds tolerance {tolerance:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
