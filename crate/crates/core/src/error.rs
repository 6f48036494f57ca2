use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Gamma evaluated at a non-positive integer.
    Pole { x: f64 },
    /// An input parameter is outside its admissible set.
    Parameter { name: &'static str, value: f64 },
    /// The requested evaluation lies outside the supported numeric envelope.
    Range { what: &'static str, value: f64 },
    /// A time argument on the wrong side of the type-change line, or outside the domain.
    Domain { t: f64, lo: f64, hi: f64 },
    /// A grid that does not satisfy the operator's layout requirements.
    Grid(&'static str),
    /// Too few quadrature intervals for the requested truncation order.
    Resolution { intervals: usize, required: usize },
    /// A construction whose precondition does not hold (e.g. a determinant that is not zero).
    Precondition { what: &'static str, value: f64 },
    /// Root finding was given a bracket without a sign change.
    NoSignChange { lo: f64, hi: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Pole { x } => write!(f, "gamma function pole at {x}"),
            Error::Parameter { name, value } => write!(f, "invalid parameter {name} = {value}"),
            Error::Range { what, value } => {
                write!(f, "{what} = {value} is outside the supported evaluation range")
            }
            Error::Domain { t, lo, hi } => write!(f, "t = {t} is outside [{lo}, {hi}]"),
            Error::Grid(msg) => write!(f, "grid error: {msg}"),
            Error::Resolution {
                intervals,
                required,
            } => write!(
                f,
                "grid has {intervals} intervals, at least {required} are required"
            ),
            Error::Precondition { what, value } => {
                write!(f, "precondition failed: {what} (value {value})")
            }
            Error::NoSignChange { lo, hi } => {
                write!(f, "no sign change on bracket [{lo}, {hi}]")
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check(cond: bool, name: &'static str, value: f64) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter { name, value })
    }
}
