//! The coefficient-ring contract shared by every series.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{format_rational, parse_rational, vp, Prime, Rational, Valuation};

/// A commutative ring that can carry series coefficients.
///
/// The optional queries return `None` when the instantiation has no such notion.
pub trait CoefficientRing:
    Clone + PartialEq + Debug + Send + Sync + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// The image of a rational scalar.
    fn from_rational(q: &Rational) -> Self;

    /// Multiplicative inverse, when it exists.
    fn try_inverse(&self) -> Option<Self>;

    /// The p-adic valuation, for rational-valued rings.
    fn valuation(&self, _p: Prime) -> Option<Valuation> {
        None
    }

    /// The homogeneous degree, for graded rings; `None` if inhomogeneous or ungraded.
    fn grading(&self, _p: Prime) -> Option<i64> {
        None
    }

    /// Canonical text form used in JSON.
    fn to_text(&self) -> String;

    fn from_text(text: &str) -> Result<Self, String>;

    /// Rough heap footprint, for the memory budget.
    fn approx_bytes(&self) -> usize;

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self) {
        let cur = std::mem::replace(self, Self::zero());
        *self = cur + a.clone() * b.clone();
    }

    fn add_ref(&mut self, a: &Self) {
        let cur = std::mem::replace(self, Self::zero());
        *self = cur + a.clone();
    }

    fn mul_ref(&self, a: &Self) -> Self {
        self.clone() * a.clone()
    }
}

impl CoefficientRing for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn try_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn valuation(&self, p: Prime) -> Option<Valuation> {
        Some(vp(self, p))
    }

    fn grading(&self, _p: Prime) -> Option<i64> {
        Some(0)
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }

    fn from_text(text: &str) -> Result<Self, String> {
        parse_rational(text).map_err(|e| e.to_string())
    }

    fn approx_bytes(&self) -> usize {
        let bits = self.numer().bits() + self.denom().bits();
        64 + (bits as usize) / 8
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += a * b;
    }

    fn add_ref(&mut self, a: &Self) {
        *self += a;
    }

    fn mul_ref(&self, a: &Self) -> Self {
        self * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn rational_instance() {
        let mut x = ratio(1, 2);
        x.add_product(&ratio(1, 3), &ratio(3, 1));
        assert_eq!(x, ratio(3, 2));
        assert_eq!(x.try_inverse(), Some(ratio(2, 3)));
        assert_eq!(Rational::zero().try_inverse(), None);
        let two = Prime::new(2).unwrap();
        assert_eq!(x.valuation(two), Some(Valuation::Finite(-1)));
        assert_eq!(Rational::from_text(&x.to_text()).unwrap(), x);
    }
}
