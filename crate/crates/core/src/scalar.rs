//! Scalar abstraction: all numeric code is generic over the real field
//! (`f32` or `f64`) and over the element kind (real or complex on that field).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point field the library is instantiated over.
///
/// A real scalar is also an [`Element`] of real tensors (its own `Real`
/// type), which is what lets one set of tensor and shrinkage code cover
/// the real and complex cases. Functions that additionally build complex
/// tensors over `F` state `Complex<F>: Element<Real = F>` explicitly —
/// true for both `f32` and `f64`, but not implied by the trait system.
pub trait Scalar:
    Element<Real = Self>
    + Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Shorthand for pulling an `f64` literal into the field.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Pulls an `f64` literal into any float type; the free-function twin of
/// [`Scalar::lit`] for contexts bounded only by `Element`.
#[inline]
pub fn lit<F: Float + FromPrimitive>(x: f64) -> F {
    F::from_f64(x).expect("literal representable in float type")
}

/// Element of a tensor or field: either a real scalar or a complex number
/// over one. Gives the handful of operations the transforms and shrinkage
/// rules need, with `modulus`/`conj` meaning absolute value/identity in the
/// real case.
pub trait Element:
    Copy + PartialEq + NumAssign + Neg<Output = Self> + Debug + Send + Sync + 'static
{
    /// The underlying real field. Spelled out structurally rather than as
    /// `Scalar` to keep the two traits from requiring each other.
    type Real: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static;

    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    fn modulus(self) -> Self::Real;
    fn modulus_sq(self) -> Self::Real;
    fn scale(self, k: Self::Real) -> Self;
    fn is_finite(self) -> bool;
    /// Real part (the value itself in the real case).
    fn real_part(self) -> Self::Real;
}

macro_rules! real_element {
    ($t:ty) => {
        impl Element for $t {
            type Real = $t;

            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn modulus_sq(self) -> $t {
                self * self
            }
            #[inline]
            fn scale(self, k: $t) -> Self {
                self * k
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            #[inline]
            fn real_part(self) -> $t {
                self
            }
        }
    };
}

macro_rules! complex_element {
    ($t:ty) => {
        impl Element for Complex<$t> {
            type Real = $t;

            #[inline]
            fn from_real(r: $t) -> Self {
                Complex::new(r, 0.0)
            }
            #[inline]
            fn conj(self) -> Self {
                Complex::conj(&self)
            }
            #[inline]
            fn modulus(self) -> $t {
                (self.re * self.re + self.im * self.im).sqrt()
            }
            #[inline]
            fn modulus_sq(self) -> $t {
                self.re * self.re + self.im * self.im
            }
            #[inline]
            fn scale(self, k: $t) -> Self {
                Complex::new(self.re * k, self.im * k)
            }
            #[inline]
            fn is_finite(self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
            #[inline]
            fn real_part(self) -> $t {
                self.re
            }
        }
    };
}

real_element!(f32);
real_element!(f64);
complex_element!(f32);
complex_element!(f64);
