//! Scalar abstraction shared by every geometric routine in this crate.
//!
//! Tables live in one of two coordinate fields: plain rationals for the
//! rectilinear families (T-fractal, carpets, squares) and the quadratic
//! extension `Q(sqrt 3)` for the Koch family, whose reflections rotate by
//! multiples of pi/3.  All geometry is written once, generically over
//! [`Scalar`], and instantiated at both fields.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::qsqrt3::QSqrt3;

/// Exact sign of a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }
    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }
    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
    /// -1, 0 or +1.
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

/// An exact field scalar with a decidable sign.
///
/// Implementors are `BigRational` (the field Q) and [`QSqrt3`] (the field
/// Q(sqrt 3)).  Every operation is exact; there is no rounding anywhere.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + Hash
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + PartialOrd
    + Ord
    + 'static
{
    /// Exact sign, decided by integer arithmetic only.
    fn sign(&self) -> Sign;

    /// Embed a rational number.
    fn from_rational(q: BigRational) -> Self;

    /// The rational part `a` of `a + b*sqrt(3)`.  For plain rationals this is
    /// the value itself.
    fn rational_part(&self) -> BigRational;

    /// The coefficient `b` of `a + b*sqrt(3)`.  Zero for plain rationals.
    fn sqrt3_part(&self) -> BigRational;

    /// `sqrt(3)` if representable in this field.
    fn sqrt3() -> Option<Self>;

    /// Lossy conversion used only when rendering.
    fn to_f64(&self) -> f64;

    /// Approximate value together with a magnitude bound that dominates the
    /// absolute values of all representation components (so cancellation in
    /// `a + b*sqrt(3)` cannot hide conversion error).  Drives the floating
    /// point filter in the ray caster; exact code never relies on it.
    fn approx_with_mag(&self) -> (f64, f64);

    fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The value as a rational, if its sqrt(3) coefficient vanishes.
    fn as_rational(&self) -> Option<BigRational> {
        if self.sqrt3_part().is_zero() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    fn is_positive_scalar(&self) -> bool {
        self.sign().is_positive()
    }

    fn is_negative_scalar(&self) -> bool {
        self.sign().is_negative()
    }
}

impl Scalar for BigRational {
    fn sign(&self) -> Sign {
        if self.is_zero() {
            Sign::Zero
        } else if self.numer().is_negative() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    fn from_rational(q: BigRational) -> Self {
        q
    }

    fn rational_part(&self) -> BigRational {
        self.clone()
    }

    fn sqrt3_part(&self) -> BigRational {
        BigRational::zero()
    }

    fn sqrt3() -> Option<Self> {
        None
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn approx_with_mag(&self) -> (f64, f64) {
        let v = rational_to_f64(self);
        (v, v.abs())
    }
}

/// Convert a big rational to `f64` for rendering.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    // Good enough for SVG output; exact code never calls this.
    let n = q.numer();
    let d = q.denom();
    let nf = bigint_to_f64(n);
    let df = bigint_to_f64(d);
    nf / df
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for QSqrt3 {
    fn sign(&self) -> Sign {
        QSqrt3::sign(self)
    }

    fn from_rational(q: BigRational) -> Self {
        QSqrt3::from_rational(q)
    }

    fn rational_part(&self) -> BigRational {
        self.a().clone()
    }

    fn sqrt3_part(&self) -> BigRational {
        self.b().clone()
    }

    fn sqrt3() -> Option<Self> {
        Some(QSqrt3::sqrt3())
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self.a()) + rational_to_f64(self.b()) * 3f64.sqrt()
    }

    fn approx_with_mag(&self) -> (f64, f64) {
        let a = rational_to_f64(self.a());
        let b = rational_to_f64(self.b());
        (a + b * 3f64.sqrt(), a.abs() + 2.0 * b.abs())
    }
}

/// Parse a rational literal of the form `p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}
