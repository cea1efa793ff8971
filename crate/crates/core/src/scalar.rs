use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerical core is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance of `x`, floored at a small multiple of machine epsilon so
    /// that `f64`-calibrated thresholds stay meaningful in lower precision.
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Exponent of an lp functional: a finite `p >= 1` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Exponent<T> {
    pub fn new(p: T) -> Result<Self, crate::QslError> {
        if p.is_nan() || p < T::one() {
            return Err(crate::QslError::InvalidExponent(p.to_f64_lossy()));
        }
        if p.is_infinite() {
            Ok(Exponent::Infinite)
        } else {
            Ok(Exponent::Finite(p))
        }
    }

    pub fn finite(p: f64) -> Self {
        Exponent::Finite(T::lit(p))
    }

    /// `p` as a real number, `+inf` for the infinite exponent.
    pub fn value(self) -> T {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => T::infinity(),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }
}

impl<T: Real> Display for Exponent<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_tracks_precision() {
        assert_eq!(f64::tol(1e-10), 1e-10);
        assert!(f32::tol(1e-10) > 1e-6);
    }

    #[test]
    fn exponent_rejects_below_one() {
        assert!(Exponent::<f64>::new(0.5).is_err());
        assert!(Exponent::<f64>::new(f64::NAN).is_err());
        assert_eq!(Exponent::<f64>::new(f64::INFINITY).unwrap(), Exponent::Infinite);
        assert_eq!(Exponent::<f64>::new(2.0).unwrap().value(), 2.0);
    }
}
