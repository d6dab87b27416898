use std::fmt;

/// A value in `R ∪ {+∞}`.
///
/// Support functions and gauges take the value `+∞` outside their domain.
/// Keeping the infinite case as a separate variant forces callers to branch
/// instead of letting `f64::INFINITY` leak into arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// `self <= bound`, with `+∞` never below a finite bound.
    pub fn at_most(&self, bound: f64) -> bool {
        match *self {
            ExtendedReal::Finite(v) => v <= bound,
            ExtendedReal::PosInfinity => false,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => f.write_str("inf"),
        }
    }
}
