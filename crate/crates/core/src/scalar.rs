//! Numeric abstraction shared by the scoring and prediction code.
//!
//! Everything that is pure arithmetic over weights and durations is written
//! against [`Scalar`], so the same code runs on `f32`, `f64` or exact
//! rationals (`Ratio<i64>`). Rationals make the priority tables reproducible
//! with zero tolerance independent of binary floating point.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Converts a literal configuration value. Panics only if the value is
    /// not representable (NaN into a rational), which is a programming error.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| panic!("{v} is not representable"))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_negative(self) -> bool {
        self < Self::zero()
    }
}

impl<T> Scalar for T where
    T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// Clamps `v` into `[lo, hi]`; works for partially ordered scalars.
pub fn clamp<T: PartialOrd>(v: T, lo: T, hi: T) -> T {
    if v < lo {
        lo
    } else if v > hi {
        hi
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn rational_literals_are_exact() {
        let r: Ratio<i64> = Scalar::lit(1.5);
        assert_eq!(r, Ratio::new(3, 2));
        assert_eq!(<Ratio<i64> as Scalar>::lit(0.5) + Ratio::new(1, 2), Ratio::from_integer(1));
    }

    #[test]
    fn clamp_bounds() {
        assert_eq!(clamp(0.2, 1.0, 10.0), 1.0);
        assert_eq!(clamp(10.5, 1.0, 10.0), 10.0);
        assert_eq!(clamp(4.0f32, 1.0, 10.0), 4.0);
    }
}
