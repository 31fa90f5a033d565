//! Scalar traits shared by polynomials, rational functions and matrices.

use std::fmt::{Debug, Display};
use std::ops::{Div, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Commutative ring with identity.
pub trait Ring:
    Clone + Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync
{
}

/// Ring where every nonzero element is invertible.
pub trait Field: Ring + Div<Output = Self> {
    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

/// Coefficient field of polynomials.
///
/// Exact fields get content normalization and gcd-based simplification;
/// floating types only get sign normalization.
pub trait Coeff: Field + Display + 'static {
    fn from_rational(q: &BigRational) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_negative(&self) -> bool;
    fn is_exact() -> bool;

    /// Positive scalar c such that every coefficient divided by c is an
    /// integer with overall gcd 1. Only meaningful for exact fields.
    fn content<'a, I: Iterator<Item = &'a Self>>(_coeffs: I) -> Self {
        Self::one()
    }
}

impl Ring for BigInt {}
impl Ring for BigRational {}
impl Field for BigRational {}

impl Coeff for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_exact() -> bool {
        true
    }
    fn content<'a, I: Iterator<Item = &'a Self>>(coeffs: I) -> Self {
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in coeffs {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        if g.is_zero() {
            return Self::one();
        }
        BigRational::new(g, l)
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Ring for $t {}
        impl Field for $t {}
        impl Coeff for $t {
            fn from_rational(q: &BigRational) -> Self {
                ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $t
            }
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn is_negative(&self) -> bool {
                *self < 0.0
            }
            fn is_exact() -> bool {
                false
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);
