//! Certified real-root machinery: Sturm sequences, isolation of the
//! smallest positive root, and real algebraic numbers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numfmt;
use crate::polycore::{IntervalValue, UPoly};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RootError {
    #[error("polynomial vanishes at the left endpoint of the counting interval")]
    PVanishesAtLeftEndpoint,
    #[error("polynomial has no positive real root")]
    NoPositiveRoot,
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("polynomial vanishes at the origin")]
    VanishesAtOrigin,
}

impl RootError {
    pub fn code(&self) -> &'static str {
        match self {
            RootError::PVanishesAtLeftEndpoint => "P_VANISHES_AT_LEFT_ENDPOINT",
            RootError::NoPositiveRoot => "NO_POSITIVE_ROOT",
            RootError::ConstantPolynomial => "CONSTANT_POLYNOMIAL",
            RootError::VanishesAtOrigin => "VANISHES_AT_ORIGIN",
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Signed remainder sequence of a square-free polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<UPoly>,
}

impl SturmSequence {
    pub fn new(p: &UPoly) -> Self {
        let mut seq = vec![normalize_positive(p), normalize_positive(&p.derivative())];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            seq.push(normalize_positive(&r));
        }
        seq.pop();
        SturmSequence { seq }
    }

    /// Sign variations at `x`, zeros skipped.
    pub fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.seq {
            let s = p.sign_at(x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct roots in `(a, b]`; `p(a)` must be nonzero.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> Result<usize, RootError> {
        if self.seq[0].sign_at(a) == Ordering::Equal {
            return Err(RootError::PVanishesAtLeftEndpoint);
        }
        Ok(self.variations(a).saturating_sub(self.variations(b)))
    }
}

/// Divides by the absolute value of the leading coefficient, keeping signs.
fn normalize_positive(p: &UPoly) -> UPoly {
    match p.leading_coeff() {
        None => UPoly::zero(),
        Some(lc) => p.scale(&lc.abs().recip()),
    }
}

/// Number of distinct real roots of `p` in `(a, b]`.
pub fn sturm_count(p: &UPoly, a: &BigRational, b: &BigRational) -> Result<usize, RootError> {
    if p.is_zero() {
        return Err(RootError::PVanishesAtLeftEndpoint);
    }
    if p.is_constant() {
        return Ok(0);
    }
    SturmSequence::new(&p.square_free_part()).count(a, b)
}

/// Cauchy bound `1 + max |a_i / a_n|`, rounded up to a power of two.
pub fn cauchy_bound(p: &UPoly) -> BigRational {
    let lc = p.leading_coeff().expect("nonzero polynomial").abs();
    let n = p.degree().unwrap();
    let mut m = BigRational::zero();
    for c in &p.coeffs()[..n] {
        let r = c.abs() / &lc;
        if r > m {
            m = r;
        }
    }
    let b = m + BigRational::one();
    let mut pw = BigRational::one();
    while pw < b {
        pw *= rat(2);
    }
    pw
}

/// Square-free, primitive integer polynomial with positive constant term
/// (or positive leading coefficient when the constant term is zero).
fn canonical_defining_poly(p: &UPoly) -> UPoly {
    let sf = p.square_free_part().primitive_part();
    let key = if sf.coeff(0).is_zero() {
        sf.leading_coeff().cloned().unwrap_or_else(BigRational::zero)
    } else {
        sf.coeff(0)
    };
    if key.is_negative() {
        sf.neg()
    } else {
        sf
    }
}

/// Real algebraic number: a root of a square-free integer polynomial,
/// isolated by an interval `(lo, hi]` containing exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicNumber {
    minpoly: UPoly,
    interval: IntervalValue,
    exact: Option<BigRational>,
    history: Vec<IntervalValue>,
}

impl AlgebraicNumber {
    pub fn from_rational(x: BigRational) -> Self {
        let minpoly = canonical_defining_poly(&UPoly::from_coeffs(vec![-x.clone(), BigRational::one()]));
        let iv = IntervalValue::point(x.clone());
        AlgebraicNumber {
            minpoly,
            interval: iv.clone(),
            exact: Some(x),
            history: vec![iv],
        }
    }

    /// Defining polynomial (square-free, primitive, integer coefficients).
    pub fn minpoly(&self) -> &UPoly {
        &self.minpoly
    }

    pub fn interval(&self) -> &IntervalValue {
        &self.interval
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    /// All isolating intervals produced so far, outermost first.
    pub fn history(&self) -> &[IntervalValue] {
        &self.history
    }

    pub fn to_f64(&self) -> f64 {
        self.interval.mid_f64()
    }

    pub fn decimal(&self, digits: usize) -> String {
        numfmt::interval_string(&self.interval, digits)
    }

    /// Narrows the isolating interval to width at most `target_width`. The
    /// new interval is nested in the old one.
    pub fn refine(&self, target_width: &BigRational) -> AlgebraicNumber {
        let mut out = self.clone();
        if out.exact.is_some() || out.interval.width() <= *target_width {
            return out;
        }
        let p = &self.minpoly;
        let mut lo = self.interval.lo().clone();
        let mut hi = self.interval.hi().clone();
        let slo = p.sign_at(&lo);
        while &hi - &lo > *target_width {
            let mid = (&lo + &hi) * half();
            match p.sign_at(&mid) {
                Ordering::Equal => {
                    out.set_exact(mid);
                    return out;
                }
                s if s == slo => lo = mid,
                _ => hi = mid,
            }
        }
        if p.sign_at(&hi) == Ordering::Equal {
            out.set_exact(hi);
            return out;
        }
        out.interval = IntervalValue::new(lo, hi);
        out.history.push(out.interval.clone());
        out
    }

    /// Halves the interval width `bits` times.
    pub fn refine_bits(&self, bits: u32) -> AlgebraicNumber {
        let w = self.interval.width() / BigRational::from_integer(BigInt::one() << bits as usize);
        self.refine(&w)
    }

    fn set_exact(&mut self, x: BigRational) {
        self.minpoly =
            canonical_defining_poly(&UPoly::from_coeffs(vec![-x.clone(), BigRational::one()]));
        self.interval = IntervalValue::point(x.clone());
        self.history.push(self.interval.clone());
        self.exact = Some(x);
    }

    /// Exact test for `q(self) = 0`.
    pub fn vanishes(&self, q: &UPoly) -> bool {
        if let Some(x) = &self.exact {
            return q.eval(x).is_zero();
        }
        if q.is_zero() {
            return true;
        }
        let g = q.gcd(&self.minpoly);
        if g.is_constant() {
            return false;
        }
        // lo is never a root of the defining polynomial, hence not of g
        sturm_count(&g, self.interval.lo(), self.interval.hi()).unwrap_or(0) > 0
    }

    /// Exact sign of `q(self)`, refining a private copy as needed.
    pub fn sign_of(&self, q: &UPoly) -> Ordering {
        if let Some(x) = &self.exact {
            return q.sign_at(x);
        }
        if self.vanishes(q) {
            return Ordering::Equal;
        }
        let mut a = self.clone();
        loop {
            if let Some(s) = q.eval_interval_centered(&a.interval).certain_sign() {
                return s;
            }
            a = a.refine_bits(16);
            if let Some(x) = &a.exact {
                return q.sign_at(x);
            }
        }
    }

    /// Enclosure of `q(self)` at the current interval.
    pub fn eval(&self, q: &UPoly) -> IntervalValue {
        match &self.exact {
            Some(x) => IntervalValue::point(q.eval(x)),
            None => q.eval_interval_centered(&self.interval),
        }
    }
}

/// Attempts to identify the root isolated in `(lo, hi]` as a rational by
/// screening candidates `a/b` with `b | lc(p)`. Requires `hi - lo < 1`.
fn screen_rational_root(p: &UPoly, lo: &BigRational, hi: &BigRational) -> Option<BigRational> {
    let ints = p.primitive_part().integer_coeffs()?;
    let lc = ints.last()?.abs();
    let a0 = ints.iter().find(|c| !c.is_zero())?.abs();
    // divisor enumeration is only attempted for moderately sized leading coefficients
    let lc_small = lc.to_u64().filter(|&v| v <= 1_000_000_000_000)?;
    let mut divisors = Vec::new();
    let mut k: u64 = 1;
    while k * k <= lc_small {
        if lc_small % k == 0 {
            divisors.push(k);
            if k * k != lc_small {
                divisors.push(lc_small / k);
            }
        }
        k += 1;
    }
    divisors.sort_unstable();
    for b in divisors {
        let bb = BigRational::from_integer(BigInt::from(b));
        let first = (lo * &bb).floor().to_integer();
        let last = (hi * &bb).floor().to_integer();
        let mut a = first;
        while a <= last {
            let cand = BigRational::new(a.clone(), BigInt::from(b));
            if &cand > lo
                && &cand <= hi
                && (cand.numer().is_zero() || a0.is_multiple_of(cand.numer()))
                && p.eval(&cand).is_zero()
            {
                return Some(cand);
            }
            a += 1;
        }
    }
    None
}

/// Isolates the smallest positive real root of `p` to width at most
/// `target_width`.
pub fn smallest_positive_root(
    p: &UPoly,
    target_width: &BigRational,
) -> Result<AlgebraicNumber, RootError> {
    if p.is_constant() {
        return Err(RootError::ConstantPolynomial);
    }
    if p.coeff(0).is_zero() {
        return Err(RootError::VanishesAtOrigin);
    }
    let sf = canonical_defining_poly(p);
    let sturm = SturmSequence::new(&sf);
    let zero = BigRational::zero();
    let bound = cauchy_bound(&sf);
    if sturm.count(&zero, &bound)? == 0 {
        return Err(RootError::NoPositiveRoot);
    }
    // invariant: no root in (0, lo], the smallest root lies in (lo, hi]
    let mut lo = zero;
    let mut hi = bound;
    while sturm.count(&lo, &hi)? > 1 {
        let mid = (&lo + &hi) * half();
        if sturm.count(&lo, &mid)? >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut first = AlgebraicNumber {
        minpoly: sf.clone(),
        interval: IntervalValue::new(lo, hi),
        exact: None,
        history: Vec::new(),
    };
    if sf.sign_at(first.interval.hi()) == Ordering::Equal {
        let x = first.interval.hi().clone();
        first.set_exact(x);
        return Ok(first);
    }
    first.history.push(first.interval.clone());
    // narrow until at most one candidate per denominator, then screen
    let lc = sf.leading_coeff().unwrap().abs();
    let screen_width = (&lc * &lc).recip() * half();
    let a = first.refine(&screen_width);
    if a.is_rational() {
        return Ok(a);
    }
    if let Some(x) = screen_rational_root(&sf, a.interval.lo(), a.interval.hi()) {
        let mut a = a;
        a.set_exact(x);
        return Ok(a);
    }
    Ok(a.refine(target_width))
}

/// Isolating intervals for every distinct root of `p` in `(a, b]`, each
/// refined to width at most `width`, in increasing order. Exact rational
/// roots come back as point intervals.
pub fn isolate_roots(
    p: &UPoly,
    a: &BigRational,
    b: &BigRational,
    width: &BigRational,
) -> Result<Vec<IntervalValue>, RootError> {
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let sf = canonical_defining_poly(p);
    let sturm = SturmSequence::new(&sf);
    let mut out = Vec::new();
    let mut stack = vec![(a.clone(), b.clone())];
    sturm.count(a, b)?;
    while let Some((lo, hi)) = stack.pop() {
        let c = sturm.count(&lo, &hi)?;
        if c == 0 {
            continue;
        }
        if c == 1 {
            let alg = AlgebraicNumber {
                minpoly: sf.clone(),
                interval: IntervalValue::new(lo.clone(), hi.clone()),
                exact: None,
                history: Vec::new(),
            };
            let alg = if sf.sign_at(&hi) == Ordering::Equal {
                AlgebraicNumber::from_rational(hi)
            } else {
                alg.refine(width)
            };
            out.push(alg.interval);
            continue;
        }
        let mid = (&lo + &hi) * half();
        if sf.sign_at(&mid) == Ordering::Equal {
            // exact root at the split point: cut out a small window around it
            out.push(IntervalValue::point(mid.clone()));
            let mut delta = (&hi - &lo) / rat(4);
            loop {
                let left = &mid - &delta;
                let right = &mid + &delta;
                if sf.sign_at(&left) != Ordering::Equal
                    && sf.sign_at(&right) != Ordering::Equal
                    && sturm.count(&left, &right)? == 1
                {
                    stack.push((right, hi));
                    stack.push((lo, left));
                    break;
                }
                delta *= half();
            }
            continue;
        }
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|x, y| x.lo().cmp(y.lo()));
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn tiny() -> BigRational {
        BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 30))
    }

    #[test]
    fn counts_on_unit_interval() {
        let z = q(0, 1);
        let one = q(1, 1);
        assert_eq!(sturm_count(&UPoly::from_ints(&[1, -2]), &z, &one), Ok(1));
        assert_eq!(sturm_count(&UPoly::from_ints(&[1, -1, -1]), &z, &one), Ok(1));
        assert_eq!(sturm_count(&UPoly::from_ints(&[1, 0, 1]), &z, &one), Ok(0));
        assert_eq!(
            sturm_count(&UPoly::from_ints(&[0, 1]), &z, &one),
            Err(RootError::PVanishesAtLeftEndpoint)
        );
    }

    #[test]
    fn right_endpoint_roots_are_counted() {
        let p = UPoly::from_ints(&[1, -2]);
        assert_eq!(sturm_count(&p, &q(0, 1), &q(1, 2)), Ok(1));
        assert_eq!(sturm_count(&p, &q(1, 2), &q(1, 1)), Err(RootError::PVanishesAtLeftEndpoint));
    }

    #[test]
    fn rational_root_detected_exactly() {
        let r = smallest_positive_root(&UPoly::from_ints(&[1, -2]), &tiny()).unwrap();
        assert_eq!(r.exact(), Some(&q(1, 2)));
        assert!(r.interval().is_point());
        let r = smallest_positive_root(&UPoly::from_ints(&[2, -7, 3]), &tiny()).unwrap();
        assert_eq!(r.exact(), Some(&q(1, 3)));
    }

    #[test]
    fn golden_ratio_conjugate() {
        let r = smallest_positive_root(&UPoly::from_ints(&[1, -1, -1]), &tiny()).unwrap();
        assert!(!r.is_rational());
        assert!(r.interval().width() <= tiny());
        assert!((r.to_f64() - 0.6180339887498949).abs() < 1e-15);
    }

    #[test]
    fn repeated_factor_is_removed() {
        // (1 - 2t)^2 (1 - 3t)
        let p = UPoly::from_ints(&[1, -2]).pow(2).mul(&UPoly::from_ints(&[1, -3]));
        let r = smallest_positive_root(&p, &tiny()).unwrap();
        assert_eq!(r.exact(), Some(&q(1, 3)));
    }

    #[test]
    fn no_positive_root() {
        assert_eq!(
            smallest_positive_root(&UPoly::from_ints(&[1, 1]), &tiny()).unwrap_err(),
            RootError::NoPositiveRoot
        );
        assert_eq!(
            smallest_positive_root(&UPoly::from_ints(&[1, 0, 1]), &tiny()).unwrap_err(),
            RootError::NoPositiveRoot
        );
    }

    #[test]
    fn exact_vanishing_and_sign() {
        let p = UPoly::from_ints(&[1, -1, -1]);
        let r = smallest_positive_root(&p, &q(1, 1000)).unwrap();
        // (1 - t - t^2)(1 + t) vanishes, 2t - 1 is positive
        assert!(r.vanishes(&p.mul(&UPoly::from_ints(&[1, 1]))));
        assert!(!r.vanishes(&UPoly::from_ints(&[-1, 2])));
        assert_eq!(r.sign_of(&UPoly::from_ints(&[-1, 2])), Ordering::Greater);
        assert_eq!(r.sign_of(&UPoly::from_ints(&[-618034, 1000000])), Ordering::Less);
    }

    #[test]
    fn isolates_all_roots() {
        // roots 1/4, 1/2, 3/4 plus sqrt(2)/2
        let p = UPoly::from_ints(&[1, -4])
            .mul(&UPoly::from_ints(&[1, -2]))
            .mul(&UPoly::from_ints(&[3, -4]))
            .mul(&UPoly::from_ints(&[-1, 0, 2]));
        let roots = isolate_roots(&p, &q(0, 1), &q(1, 1), &q(1, 1_000_000)).unwrap();
        assert_eq!(roots.len(), 4);
        assert!(roots[0].contains(&q(1, 4)));
        assert!(roots[1].contains(&q(1, 2)));
        assert!(roots[2].contains(&q(7071067, 10000000)));
        assert!(roots[3].contains(&q(3, 4)));
    }
}
