//! Scalar abstraction over real and complex floating point.
//!
//! Everything the fitting and evaluation stages need from a number type:
//! field arithmetic, conjugation, modulus, and conversion from the real
//! subfield. Implemented for `f64` and `Complex<f64>`.

use num_complex::Complex;
use num_traits::{Float, One, Zero};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Sum<Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    type Real: Float + Debug + Display + Send + Sync + Sum<Self::Real> + 'static;

    fn conj(self) -> Self;
    /// Modulus |z|.
    fn modulus(self) -> Self::Real;
    /// Squared modulus |z|², without the intermediate square root.
    fn modulus_sq(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn real(self) -> Self::Real;
    fn imag(self) -> Self::Real;
    /// Multiplication by a real scalar.
    fn scale(self, r: Self::Real) -> Self;
    fn is_finite(self) -> bool;
    fn real_from_f64(x: f64) -> Self::Real;

    fn from_f64(x: f64) -> Self {
        Self::from_real(Self::real_from_f64(x))
    }
}

impl Scalar for f64 {
    type Real = f64;

    #[inline]
    fn conj(self) -> Self {
        self
    }

    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }

    #[inline]
    fn modulus_sq(self) -> f64 {
        self * self
    }

    #[inline]
    fn from_real(r: f64) -> Self {
        r
    }

    #[inline]
    fn real(self) -> f64 {
        self
    }

    #[inline]
    fn imag(self) -> f64 {
        0.0
    }

    #[inline]
    fn scale(self, r: f64) -> Self {
        self * r
    }

    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    #[inline]
    fn real_from_f64(x: f64) -> f64 {
        x
    }
}

impl Scalar for Complex<f64> {
    type Real = f64;

    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }

    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }

    #[inline]
    fn modulus_sq(self) -> f64 {
        self.norm_sqr()
    }

    #[inline]
    fn from_real(r: f64) -> Self {
        Complex::new(r, 0.0)
    }

    #[inline]
    fn real(self) -> f64 {
        self.re
    }

    #[inline]
    fn imag(self) -> f64 {
        self.im
    }

    #[inline]
    fn scale(self, r: f64) -> Self {
        Complex::new(self.re * r, self.im * r)
    }

    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    #[inline]
    fn real_from_f64(x: f64) -> f64 {
        x
    }
}

/// Σ conj(aᵢ)·bᵢ — the Euclidean inner product with the first argument
/// conjugated.
pub fn dot_conj<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (&x, &y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

/// Euclidean norm √(Σ |aᵢ|²).
pub fn l2_norm<S: Scalar>(a: &[S]) -> S::Real {
    let mut acc = <S::Real as Zero>::zero();
    for &x in a {
        acc = acc + x.modulus_sq();
    }
    acc.sqrt()
}
