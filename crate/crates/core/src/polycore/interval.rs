//! Closed intervals with exact rational endpoints.
//!
//! A degenerate interval `[x, x]` is an exact value, so the same type carries
//! both exact scalars (rational critical points) and certified enclosures
//! (irrational ones). All operations are conservative: the true result of
//! the operation applied to any members of the inputs lies in the output.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalValue {
    lo: BigRational,
    hi: BigRational,
}

impl IntervalValue {
    /// Builds `[lo, hi]`. Panics if `lo > hi`.
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Self { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(x: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value, if the interval is degenerate.
    pub fn exact(&self) -> Option<&BigRational> {
        self.is_point().then_some(&self.lo)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(sign)` when the sign of every member is the same (zero only
    /// for the degenerate interval `[0, 0]`).
    pub fn certain_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_subset_of(&self, other: &IntervalValue) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Largest absolute value of a member.
    pub fn magnitude(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn hull(&self, other: &IntervalValue) -> IntervalValue {
        IntervalValue {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    pub fn intersect(&self, other: &IntervalValue) -> Option<IntervalValue> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(IntervalValue { lo, hi })
    }

    pub fn recip(&self) -> Option<IntervalValue> {
        if self.contains_zero() {
            return None;
        }
        Some(IntervalValue {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    /// Division; `None` when the divisor contains zero.
    pub fn checked_div(&self, other: &IntervalValue) -> Option<IntervalValue> {
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            if b.is_zero() {
                return None;
            }
            return Some(IntervalValue::point(a / b));
        }
        other.recip().map(|r| self * &r)
    }

    pub fn pow(&self, e: u32) -> IntervalValue {
        let mut acc = IntervalValue::one();
        if e == 0 {
            return acc;
        }
        // even powers of a zero-straddling interval are bounded below by 0
        if e % 2 == 0 && self.contains_zero() {
            let m = self.magnitude();
            let mut hi = BigRational::one();
            for _ in 0..e {
                hi *= &m;
            }
            return IntervalValue::new(BigRational::zero(), hi);
        }
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Outward rounding of both endpoints onto the dyadic grid `2^-bits`.
    /// Exact points are left untouched.
    pub fn round_outward(&self, bits: u32) -> IntervalValue {
        if self.is_point() {
            return self.clone();
        }
        let scale = BigRational::from_integer(BigInt::one() << bits as usize);
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        IntervalValue { lo, hi }
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl From<BigRational> for IntervalValue {
    fn from(x: BigRational) -> Self {
        IntervalValue::point(x)
    }
}

impl fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

impl<'a> Add<&'a IntervalValue> for &'a IntervalValue {
    type Output = IntervalValue;
    fn add(self, rhs: &'a IntervalValue) -> IntervalValue {
        IntervalValue {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl<'a> Sub<&'a IntervalValue> for &'a IntervalValue {
    type Output = IntervalValue;
    fn sub(self, rhs: &'a IntervalValue) -> IntervalValue {
        IntervalValue {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl<'a> Mul<&'a IntervalValue> for &'a IntervalValue {
    type Output = IntervalValue;
    fn mul(self, rhs: &'a IntervalValue) -> IntervalValue {
        if self.is_point() && rhs.is_point() {
            return IntervalValue::point(&self.lo * &rhs.lo);
        }
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c < &lo {
                lo = c.clone();
            }
            if c > &hi {
                hi = c.clone();
            }
        }
        IntervalValue { lo, hi }
    }
}

impl Neg for &IntervalValue {
    type Output = IntervalValue;
    fn neg(self) -> IntervalValue {
        IntervalValue {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Add for IntervalValue {
    type Output = IntervalValue;
    fn add(self, rhs: IntervalValue) -> IntervalValue {
        &self + &rhs
    }
}

impl Sub for IntervalValue {
    type Output = IntervalValue;
    fn sub(self, rhs: IntervalValue) -> IntervalValue {
        &self - &rhs
    }
}

impl Mul for IntervalValue {
    type Output = IntervalValue;
    fn mul(self, rhs: IntervalValue) -> IntervalValue {
        &self * &rhs
    }
}

impl Neg for IntervalValue {
    type Output = IntervalValue;
    fn neg(self) -> IntervalValue {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn products_cover_sign_changes() {
        let a = IntervalValue::new(r(-1, 1), r(2, 1));
        let b = IntervalValue::new(r(-3, 1), r(1, 1));
        let p = &a * &b;
        assert_eq!(p, IntervalValue::new(r(-6, 1), r(3, 1)));
    }

    #[test]
    fn division_by_zero_straddling_interval_fails() {
        let a = IntervalValue::one();
        let b = IntervalValue::new(r(-1, 2), r(1, 2));
        assert!(a.checked_div(&b).is_none());
        assert!(a.checked_div(&IntervalValue::zero()).is_none());
    }

    #[test]
    fn even_power_of_straddling_interval_is_nonnegative() {
        let a = IntervalValue::new(r(-1, 1), r(1, 1));
        let sq = a.pow(2);
        assert_eq!(sq.lo(), &r(0, 1));
        assert_eq!(sq.hi(), &r(1, 1));
    }

    #[test]
    fn outward_rounding_contains_original() {
        let a = IntervalValue::new(r(1, 3), r(2, 3));
        let b = a.round_outward(10);
        assert!(a.is_subset_of(&b));
        assert!(b.width() < r(1, 3) + r(2, 1024));
    }
}
