//! Exact arithmetic in the real quadratic field Q(sqrt 3).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("division by zero")]
    DivisionByZero,
}

/// The number `a + b*sqrt(3)` with `a`, `b` rational and kept canonical.
///
/// The representation is unique: two values are equal iff both coordinates
/// agree, and the value is zero iff `a = b = 0` (sqrt 3 is irrational).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSqrt3 {
    a: BigRational,
    b: BigRational,
}

impl QSqrt3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt3 { a, b }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QSqrt3 {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn sqrt3() -> Self {
        QSqrt3 {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    /// `num/den * sqrt(3)`.
    pub fn sqrt3_times(num: i64, den: i64) -> Self {
        QSqrt3 {
            a: BigRational::zero(),
            b: BigRational::new(BigInt::from(num), BigInt::from(den)),
        }
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    /// Field conjugate `a - b*sqrt(3)`.
    pub fn conjugate(&self) -> Self {
        QSqrt3 {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a^2 - 3 b^2`, a rational.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(BigInt::from(3)) * &self.b * &self.b
    }

    /// Exact sign, decided purely with integer arithmetic: when `a` and `b`
    /// disagree in sign the comparison `a^2` vs `3 b^2` settles it.
    pub fn sign(&self) -> Sign {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        match (sa, sb) {
            (Sign::Zero, s) | (s, Sign::Zero) => s,
            (a, b) if a == b => a,
            _ => {
                // a and b have strictly opposite signs; |a| vs |b|*sqrt(3)
                // reduces to a^2 vs 3 b^2.  Equality is impossible.
                let a2 = &self.a * &self.a;
                let b23 = BigRational::from_integer(BigInt::from(3)) * &self.b * &self.b;
                if a2 > b23 {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithmeticError> {
        let inv = rhs.checked_inv()?;
        Ok(self.clone() * inv)
    }

    /// Multiplicative inverse via the conjugate: `1/(a+b√3) = (a-b√3)/(a²-3b²)`.
    pub fn checked_inv(&self) -> Result<Self, ArithmeticError> {
        if self.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        let n = self.norm();
        Ok(QSqrt3 {
            a: &self.a / &n,
            b: -(&self.b / &n),
        })
    }
}

fn rational_sign(q: &BigRational) -> Sign {
    if q.is_zero() {
        Sign::Zero
    } else if q.numer().is_negative() {
        Sign::Negative
    } else {
        Sign::Positive
    }
}

impl fmt::Debug for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt3", self.b)
        } else {
            write!(f, "{} + {}*sqrt3", self.a, self.b)
        }
    }
}

impl Add for QSqrt3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        QSqrt3 {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl Sub for QSqrt3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        QSqrt3 {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
        }
    }
}

impl Mul for QSqrt3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let three = BigRational::from_integer(BigInt::from(3));
        QSqrt3 {
            a: &self.a * &rhs.a + three * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Div for QSqrt3 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by zero in QSqrt3")
    }
}

impl Neg for QSqrt3 {
    type Output = Self;
    fn neg(self) -> Self {
        QSqrt3 {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl AddAssign for QSqrt3 {
    fn add_assign(&mut self, rhs: Self) {
        self.a += rhs.a;
        self.b += rhs.b;
    }
}

impl SubAssign for QSqrt3 {
    fn sub_assign(&mut self, rhs: Self) {
        self.a -= rhs.a;
        self.b -= rhs.b;
    }
}

impl MulAssign for QSqrt3 {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.clone() * rhs;
    }
}

impl Zero for QSqrt3 {
    fn zero() -> Self {
        QSqrt3 {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt3 {
    fn one() -> Self {
        QSqrt3 {
            a: BigRational::one(),
            b: BigRational::zero(),
        }
    }
}

impl PartialOrd for QSqrt3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt3 {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.clone() - other.clone();
        match diff.sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn product_expansion() {
        // (1 + sqrt3)(2 - sqrt3) = -1 + sqrt3
        let x = QSqrt3::new(q(1, 1), q(1, 1));
        let y = QSqrt3::new(q(2, 1), q(-1, 1));
        assert_eq!(x * y, QSqrt3::new(q(-1, 1), q(1, 1)));
    }

    #[test]
    fn additive_identity() {
        let x = QSqrt3::new(q(5, 7), q(-2, 3));
        assert_eq!(QSqrt3::zero() + x.clone(), x);
    }

    #[test]
    fn inverse_of_one_plus_sqrt3() {
        // 1/(1+sqrt3) = -1/2 + (1/2) sqrt3; checked by multiplying back.
        let x = QSqrt3::new(q(1, 1), q(1, 1));
        let inv = x.checked_inv().unwrap();
        assert_eq!(inv, QSqrt3::new(q(-1, 2), q(1, 2)));
        assert_eq!(x * inv, QSqrt3::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let x = QSqrt3::one();
        assert_eq!(
            x.checked_div(&QSqrt3::zero()),
            Err(ArithmeticError::DivisionByZero)
        );
    }

    #[test]
    fn exact_signs() {
        // 2 - sqrt3 > 0 since 4 > 3
        assert_eq!(QSqrt3::new(q(2, 1), q(-1, 1)).sign(), Sign::Positive);
        assert_eq!(QSqrt3::zero().sign(), Sign::Zero);
        // 5 - 3 sqrt3 < 0 since 25 < 27
        assert_eq!(QSqrt3::new(q(5, 1), q(-3, 1)).sign(), Sign::Negative);
    }

    #[test]
    fn ordering_is_consistent_with_subtraction() {
        let a = QSqrt3::new(q(0, 1), q(1, 1)); // sqrt3 ~ 1.732
        let b = QSqrt3::from_ratio(7, 4); // 1.75
        assert!(a < b);
        assert!(QSqrt3::from_int(2) > a);
    }
}
