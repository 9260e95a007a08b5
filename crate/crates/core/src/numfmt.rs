//! Decimal rendering of exact rationals and intervals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::polycore::IntervalValue;

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// `floor(log10(|x|))` for nonzero `x`.
pub fn decimal_exponent(x: &BigRational) -> i64 {
    let a = x.abs();
    let nd = a.numer().to_string().len() as i64;
    let dd = a.denom().to_string().len() as i64;
    let mut e = nd - dd;
    // nd - dd is within one of the answer
    loop {
        let p = ten_pow(e);
        if a < p {
            e -= 1;
        } else if a >= &p * BigRational::from_integer(10.into()) {
            e += 1;
        } else {
            return e;
        }
    }
}

fn ten_pow(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(pow10(e as u32))
    } else {
        BigRational::new(BigInt::one(), pow10((-e) as u32))
    }
}

/// Rounds `x` to `digits` significant digits (half away from zero) and
/// returns the rounded value together with its decimal rendering.
pub fn round_significant(x: &BigRational, digits: usize) -> (BigRational, String) {
    if x.is_zero() {
        return (BigRational::zero(), "0".to_string());
    }
    let e = decimal_exponent(x);
    let shift = digits as i64 - 1 - e;
    let scaled = x * ten_pow(shift);
    let neg = scaled.is_negative();
    let a = scaled.abs();
    let half = BigRational::new(1.into(), 2.into());
    let mut int = (a + half).floor().to_integer();
    let mut shift = shift;
    // strip trailing zeros
    while !int.is_zero() && shift > 0 && int.is_multiple_of(&BigInt::from(10)) {
        int /= 10;
        shift -= 1;
    }
    let value = BigRational::new(if neg { -int.clone() } else { int.clone() }, BigInt::one())
        / ten_pow(shift);
    let digits_str = int.to_string();
    let body = if shift <= 0 {
        let mut s = digits_str;
        s.push_str(&"0".repeat((-shift) as usize));
        s
    } else {
        let shift = shift as usize;
        if digits_str.len() > shift {
            let (a, b) = digits_str.split_at(digits_str.len() - shift);
            format!("{a}.{b}")
        } else {
            format!("0.{}{}", "0".repeat(shift - digits_str.len()), digits_str)
        }
    };
    let rendered = if e.abs() >= 21 {
        scientific(&int, shift, neg)
    } else if neg {
        format!("-{body}")
    } else {
        body
    };
    (value, rendered)
}

fn scientific(int: &BigInt, shift: i64, neg: bool) -> String {
    let s = int.to_string();
    let exp = s.len() as i64 - 1 - shift;
    let mant = if s.len() > 1 {
        format!("{}.{}", &s[..1], &s[1..])
    } else {
        s.clone()
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, mant, exp)
}

/// Upper bound of `x ≥ 0` rendered with two significant digits, rounded up.
pub fn bound_string(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let e = decimal_exponent(x);
    let shift = 1 - e;
    let int = (x * ten_pow(shift)).ceil().to_integer();
    let exp = -shift;
    let s = int.to_string();
    // int has two digits, or three after rounding up to 100
    let (mant, exp) = if s.len() == 3 {
        (s[..1].to_string(), exp + 2)
    } else {
        (format!("{}.{}", &s[..1], &s[1..]), exp + 1)
    };
    let mant = mant.trim_end_matches(".0").to_string();
    format!("{mant}e{exp}")
}

/// Decimal rendering of an exact value; `±` bound appended when rounding
/// to `digits` significant digits loses information.
pub fn rational_string(x: &BigRational, digits: usize) -> String {
    interval_string(&IntervalValue::point(x.clone()), digits)
}

/// `mid±bound` rendering of an interval; the bound covers both the
/// interval radius and the rounding of the midpoint.
pub fn interval_string(iv: &IntervalValue, digits: usize) -> String {
    let mid = iv.midpoint();
    let rad = iv.width() / BigRational::from_integer(2.into());
    let (rounded, s) = round_significant(&mid, digits);
    let err = rad + (&rounded - &mid).abs();
    if err.is_zero() {
        s
    } else {
        format!("{s}±{}", bound_string(&err))
    }
}

/// Nearest `f64` to a rational, or infinity when out of range.
pub fn to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    // fall back to logarithms for values outside the f64 range of either part
    let l = ln_abs(x);
    let v = l.exp();
    if x.is_negative() {
        -v
    } else {
        v
    }
}

/// Natural logarithm of `|x|` for nonzero `x`, accurate to about 1e-15
/// relative even when numerator or denominator overflow `f64`.
pub fn ln_abs(x: &BigRational) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}
