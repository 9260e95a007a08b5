//! Field-like scalars shared by the generic Hessian and elimination code.
//!
//! Two implementations matter: [`IntervalValue`] (exact points or certified
//! enclosures at a numeric critical point) and [`RatFunc`] (the same formulas
//! carried out symbolically in `Q(t)`, used for exact zero tests at algebraic
//! points).

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::interval::IntervalValue;
use super::ratfunc::RatFunc;
use super::upoly::UPoly;

pub trait Scalar: Clone + Debug {
    fn from_rational(r: &BigRational) -> Self;

    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;

    /// `None` when the divisor is zero (or may be zero).
    fn checked_div(&self, other: &Self) -> Option<Self>;

    fn is_certainly_zero(&self) -> bool;
    fn is_certainly_nonzero(&self) -> bool;

    fn zero() -> Self {
        Self::from_rational(&BigRational::zero())
    }

    fn one() -> Self {
        Self::from_rational(&BigRational::one())
    }

    fn from_int(i: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(i.into()))
    }

    fn square(&self) -> Self {
        self.times(self)
    }

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }

    /// Horner evaluation of `p` at `x`.
    fn eval_upoly(p: &UPoly, x: &Self) -> Self {
        let mut acc = Self::zero();
        for c in p.coeffs().iter().rev() {
            acc = acc.times(x).plus(&Self::from_rational(c));
        }
        acc
    }
}

impl Scalar for IntervalValue {
    fn from_rational(r: &BigRational) -> Self {
        IntervalValue::point(r.clone())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        IntervalValue::checked_div(self, other)
    }
    fn is_certainly_zero(&self) -> bool {
        self.exact().is_some_and(|x| x.is_zero())
    }
    fn is_certainly_nonzero(&self) -> bool {
        !self.contains_zero()
    }
    fn powi(&self, e: u32) -> Self {
        self.pow(e)
    }
}

impl Scalar for RatFunc {
    fn from_rational(r: &BigRational) -> Self {
        RatFunc::constant(r.clone())
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        self.div(other)
    }
    fn is_certainly_zero(&self) -> bool {
        self.is_zero()
    }
    fn is_certainly_nonzero(&self) -> bool {
        !self.is_zero()
    }
}
