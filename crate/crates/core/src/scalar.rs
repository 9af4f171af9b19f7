//! Field abstraction shared by the exact and floating paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rationals with arbitrary-size numerators and denominators.
pub type Rational = BigRational;

/// Build a rational from a small fraction. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Render as `num/den` (denominator always printed, so dumps are uniform).
pub fn rat_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Commutative field operations used by matrices, jets and the identity checks.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&rat(v, 1))
    }

    /// Integer power; negative exponents divide.
    fn powi(&self, e: i32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * self.clone();
        }
        if e < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        rat_to_f64(r)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

/// Magnitude used for pivoting; exact types only need "nonzero".
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for Rational {
    fn magnitude(&self) -> f64 {
        rat_to_f64(&self.abs())
    }
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_string_always_has_denominator() {
        assert_eq!(rat_string(&rat(4, 2)), "2/1");
        assert_eq!(rat_string(&rat(-3, 6)), "-1/2");
    }

    #[test]
    fn negative_powers_invert() {
        assert_eq!(rat(2, 3).powi(-2), rat(9, 4));
        assert_eq!(2.0f64.powi(-1), 0.5);
        assert_eq!(<Rational as Scalar>::powi(&rat(5, 1), 0), rat(1, 1));
    }
}
