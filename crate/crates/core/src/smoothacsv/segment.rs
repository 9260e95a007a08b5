//! Minimality of `(1, ρ)` via the segment test: `H(s, …, s, sρ) ≠ 0` for
//! every `0 < s < 1`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::gfparse::RationalGF;
use crate::polycore::{IntervalValue, UPoly};
use crate::realroots::{isolate_roots, sturm_count, AlgebraicNumber};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Minimality {
    Proved,
    /// `H` vanishes at `s·(1, ρ)` for some `s` in the enclosure.
    Refuted { witness: IntervalValue },
    Indeterminate,
}

impl Minimality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Minimality::Proved => "PROVED",
            Minimality::Refuted { .. } => "REFUTED",
            Minimality::Indeterminate => "INDETERMINATE",
        }
    }
}

fn dyadic(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits as usize)
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Coefficient polynomials `c_j(τ)` with `H(s, …, s, sτ) = Σ_j c_j(τ) s^j`.
pub fn segment_coefficients(gf: &RationalGF) -> Vec<UPoly> {
    let mut out: Vec<UPoly> = Vec::new();
    for (alpha, c) in gf.h_by_z() {
        let za: usize = alpha.iter().map(|&e| e as usize).sum();
        for (k, hk) in c.coeffs().iter().enumerate() {
            if hk.is_zero() {
                continue;
            }
            let j = za + k;
            if out.len() <= j {
                out.resize(j + 1, UPoly::zero());
            }
            out[j] = out[j].add(&UPoly::monomial(hk.clone(), k));
        }
    }
    out
}

/// `g(s) = H(s, …, s, sρ)` for a rational `ρ`.
pub fn segment_polynomial(gf: &RationalGF, rho: &BigRational) -> UPoly {
    UPoly::from_coeffs(segment_coefficients(gf).iter().map(|c| c.eval(rho)).collect())
}

/// Runs the segment test. `budget` bounds the number of subintervals
/// examined when `ρ` is irrational.
pub fn segment_minimality(gf: &RationalGF, rho: &AlgebraicNumber, budget: usize) -> Minimality {
    match rho.exact() {
        Some(r) => exact_segment(gf, r),
        None => interval_segment(gf, rho, budget),
    }
}

fn exact_segment(gf: &RationalGF, rho: &BigRational) -> Minimality {
    let g = segment_polynomial(gf, rho);
    let zero = BigRational::zero();
    let one = BigRational::one();
    if g.is_zero() {
        return Minimality::Refuted {
            witness: IntervalValue::new(zero, one),
        };
    }
    let total = match sturm_count(&g, &zero, &one) {
        Ok(c) => c,
        Err(_) => return Minimality::Indeterminate,
    };
    // g(1) = P(ρ) = 0 is the endpoint root
    let interior = total - usize::from(g.eval(&one).is_zero());
    if interior == 0 {
        return Minimality::Proved;
    }
    let roots = isolate_roots(&g, &zero, &one, &dyadic(20)).unwrap_or_default();
    match roots.into_iter().find(|r| r.hi() < &one || !r.contains(&one)) {
        Some(w) => Minimality::Refuted { witness: w },
        None => Minimality::Indeterminate,
    }
}

/// Horner evaluation of a polynomial with interval coefficients.
fn eval_ipoly(c: &[IntervalValue], x: &IntervalValue) -> IntervalValue {
    let mut acc = IntervalValue::zero();
    for ck in c.iter().rev() {
        acc = &(&acc * x) + ck;
    }
    acc
}

fn derivative_ipoly(c: &[IntervalValue]) -> Vec<IntervalValue> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, ck)| ck * &IntervalValue::from_int(k as i64))
        .collect()
}

/// Mean-value enclosure `g(mid) + g'(X)(X − mid)`, intersected with the
/// plain Horner enclosure.
fn enclose(c: &[IntervalValue], dc: &[IntervalValue], x: &IntervalValue) -> IntervalValue {
    let mid = IntervalValue::point(x.midpoint());
    let centered = &eval_ipoly(c, &mid) + &(&eval_ipoly(dc, x) * &(x - &mid));
    let plain = eval_ipoly(c, x);
    centered.intersect(&plain).unwrap_or(plain)
}

fn interval_segment(gf: &RationalGF, rho: &AlgebraicNumber, budget: usize) -> Minimality {
    let coeff_polys = segment_coefficients(gf);
    let mut rho = rho.clone();
    for _attempt in 0..3 {
        let c: Vec<IntervalValue> = coeff_polys
            .iter()
            .map(|p| rho.eval(p).round_outward(256))
            .collect();
        let dc = derivative_ipoly(&c);
        if let Some(result) = bisect(&c, &dc, budget) {
            return result;
        }
        rho = rho.refine_bits(128);
    }
    Minimality::Indeterminate
}

/// `None` asks the caller for a sharper `ρ`.
fn bisect(c: &[IntervalValue], dc: &[IntervalValue], budget: usize) -> Option<Minimality> {
    let one = BigRational::one();
    // window [1 - δ, 1] where g is strictly monotone, so s = 1 is its only root
    let mut delta = half();
    let mut found_window = false;
    for _ in 0..64 {
        let w = IntervalValue::new(&one - &delta, one.clone());
        if !eval_ipoly(dc, &w).contains_zero() {
            found_window = true;
            break;
        }
        delta *= half();
    }
    if !found_window {
        return None;
    }
    let mut stack = vec![IntervalValue::new(BigRational::zero(), &one - &delta)];
    let mut examined = 0usize;
    let min_width = dyadic(40);
    while let Some(x) = stack.pop() {
        examined += 1;
        if examined > budget {
            return Some(Minimality::Indeterminate);
        }
        let e = enclose(c, dc, &x);
        if !e.contains_zero() {
            continue;
        }
        let glo = eval_ipoly(c, &IntervalValue::point(x.lo().clone()));
        let ghi = eval_ipoly(c, &IntervalValue::point(x.hi().clone()));
        if let (Some(a), Some(b)) = (glo.certain_sign(), ghi.certain_sign()) {
            if a != b && a != Ordering::Equal && b != Ordering::Equal {
                return refine_witness(c, x, a);
            }
        }
        if x.width() < min_width {
            return None;
        }
        let mid = x.midpoint();
        stack.push(IntervalValue::new(mid.clone(), x.hi().clone()));
        stack.push(IntervalValue::new(x.lo().clone(), mid));
    }
    Some(Minimality::Proved)
}

/// Bisects a certified sign change down to width `2^-20`.
fn refine_witness(c: &[IntervalValue], x: IntervalValue, sign_lo: Ordering) -> Option<Minimality> {
    let mut lo = x.lo().clone();
    let mut hi = x.hi().clone();
    let target = dyadic(20);
    while &hi - &lo > target {
        let mid = (&lo + &hi) * half();
        match eval_ipoly(c, &IntervalValue::point(mid.clone())).certain_sign() {
            Some(s) if s == sign_lo => lo = mid,
            Some(Ordering::Equal) | None => {
                // cannot decide the sign at the midpoint; keep the enclosure
                break;
            }
            Some(_) => hi = mid,
        }
    }
    Some(Minimality::Refuted {
        witness: IntervalValue::new(lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfparse::parse_gf;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn compositions_segment_polynomial() {
        let gf = parse_gf("1/(1 - z1*t - t^2/(1-t))").unwrap();
        let g = segment_polynomial(&gf, &q(1, 2));
        assert_eq!(
            g,
            UPoly::from_coeffs(vec![q(1, 1), q(-1, 2), q(-3, 4), q(1, 4)])
        );
        let rho = AlgebraicNumber::from_rational(q(1, 2));
        assert_eq!(segment_minimality(&gf, &rho, 1000), Minimality::Proved);
    }

    #[test]
    fn interior_root_is_refuted() {
        let gf = parse_gf("1/(1 - 2*t + 99/100*z1*t^2)").unwrap();
        let rho = AlgebraicNumber::from_rational(q(10, 11));
        assert_eq!(
            segment_polynomial(&gf, &q(10, 11)),
            UPoly::from_coeffs(vec![q(1, 1), q(-20, 11), q(0, 1), q(9, 11)])
        );
        match segment_minimality(&gf, &rho, 1000) {
            Minimality::Refuted { witness } => {
                assert!(witness.lo() >= &q(7, 10) && witness.hi() <= &q(3, 4));
                assert!(witness.width() <= dyadic(20));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn irrational_rho_is_certified_by_bisection() {
        let gf = parse_gf("1/(1 - t - z1*t^2)").unwrap();
        let rho = crate::realroots::smallest_positive_root(&gf.p(), &dyadic(100)).unwrap();
        assert_eq!(segment_minimality(&gf, &rho, 10_000), Minimality::Proved);
    }
}
