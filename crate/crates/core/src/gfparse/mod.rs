//! Parsing and normalization of rational generating functions `G / H`.

mod parser;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::polycore::{MultiPoly, UPoly};

pub use parser::{parse_fraction, Fraction};

/// Name of the size variable.
pub const T: &str = "t";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("not a rational expression: {0}")]
    NonRational(String),
    #[error("denominator vanishes at the origin")]
    ZeroDenominatorAtOrigin,
    #[error("denominator is constant: the input is a polynomial")]
    ConstantDenominator,
    #[error("numerator is zero")]
    ZeroNumerator,
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SYNTAX_ERROR",
            ParseError::NonRational(_) => "NONRATIONAL",
            ParseError::ZeroDenominatorAtOrigin => "ZERO_DENOMINATOR_AT_ORIGIN",
            ParseError::ConstantDenominator => "CONSTANT_DENOMINATOR",
            ParseError::ZeroNumerator => "ZERO_NUMERATOR",
        }
    }
}

/// How the non-negativity of the series coefficients is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combinatorial {
    /// Follows from the shape of `G` and `H` (see [`SeriesForm`]).
    Inferred,
    /// Asserted by the caller.
    Asserted,
    Unknown,
}

impl Combinatorial {
    pub fn holds(self) -> bool {
        self != Combinatorial::Unknown
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Combinatorial::Inferred => "inferred",
            Combinatorial::Asserted => "asserted",
            Combinatorial::Unknown => "unknown",
        }
    }
}

/// Decomposition `H = 1 − q(t) − Σ q_k(t) z_k` with polynomial `q`, `q_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFamily {
    pub q: UPoly,
    pub q_list: Vec<UPoly>,
    /// Set when `q` is the zero polynomial.
    pub q_vanishes: bool,
}

/// Writing `H = u(t)·(1 − S(z, t))` where `S` has non-negative power series
/// coefficients: the z-dependent part of `S` is polynomial, the
/// z-free part is the series `n0(t) / u(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesForm {
    pub u: UPoly,
    /// `α ≠ 0 ↦ [z^α] S`, each a polynomial in `t` with non-negative
    /// coefficients.
    pub z_terms: BTreeMap<Vec<u32>, UPoly>,
    /// Numerator of `[z^0] S = n0 / u`.
    pub n0: UPoly,
}

impl SeriesForm {
    /// Exponent vectors `(α, k)` of the support of `S` with `k ≤ order`.
    pub fn support(&self, order: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let d = self.z_terms.keys().next().map(|k| k.len()).unwrap_or(0);
        let s0 = series_div(&self.n0, &self.u, order);
        for (k, c) in s0.iter().enumerate() {
            if !c.is_zero() {
                let mut v = vec![0; d];
                v.push(k as u32);
                out.push(v);
            }
        }
        for (alpha, p) in &self.z_terms {
            for (k, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() && k <= order {
                    let mut v = alpha.clone();
                    v.push(k as u32);
                    out.push(v);
                }
            }
        }
        out
    }
}

/// Validated rational generating function `F = G / H` in tracked variables
/// `z…` and size variable `t`.
#[derive(Clone, Debug)]
pub struct RationalGF {
    g: MultiPoly,
    h: MultiPoly,
    zvars: Vec<String>,
    combinatorial: Combinatorial,
    linear_family: Option<LinearFamily>,
    series_form: Option<SeriesForm>,
}

impl PartialEq for RationalGF {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g && self.h == other.h && self.zvars == other.zvars
    }
}

pub fn parse_gf(text: &str) -> Result<RationalGF, ParseError> {
    let f = parse_fraction(text)?;
    RationalGF::from_parts(f.num, f.den)
}

impl RationalGF {
    /// Normalizes and validates a numerator/denominator pair: shared
    /// monomial factors are cancelled and both are scaled so `H(0) = 1`.
    /// Coprimality of `G` and `H` beyond that is the caller's obligation.
    pub fn from_parts(g: MultiPoly, h: MultiPoly) -> Result<RationalGF, ParseError> {
        if h.is_zero() {
            return Err(ParseError::NonRational("zero denominator".into()));
        }
        if g.is_zero() {
            return Err(ParseError::ZeroNumerator);
        }
        let (g, h) = (g.trimmed(), h.trimmed());
        let mut roster = crate::polycore::multipoly::roster_union([&g, &h]);
        if !roster.iter().any(|v| v == T) {
            roster.push(T.to_string());
        }
        if let Some(bad) = roster.iter().find(|v| v.as_str() != T && !is_zvar(v)) {
            return Err(ParseError::NonRational(format!("unsupported variable {bad}")));
        }
        let g = g.with_roster(&roster);
        let h = h.with_roster(&roster);
        let mg = g.min_exponents();
        let mh = h.min_exponents();
        let common: Vec<u32> = mg.iter().zip(&mh).map(|(a, b)| *a.min(b)).collect();
        let (g, h) = (g.div_monomial(&common), h.div_monomial(&common));
        let h0 = h.constant_term();
        if h0.is_zero() {
            return Err(ParseError::ZeroDenominatorAtOrigin);
        }
        if h.is_constant() {
            return Err(ParseError::ConstantDenominator);
        }
        let s = h0.recip();
        let (g, h) = (g.scale(&s), h.scale(&s));
        let zvars: Vec<String> = h.vars().iter().filter(|v| *v != T).cloned().collect();
        let mut gf = RationalGF {
            g,
            h,
            zvars,
            combinatorial: Combinatorial::Unknown,
            linear_family: None,
            series_form: None,
        };
        gf.linear_family = gf.detect_linear_family();
        gf.series_form = gf.detect_series_form();
        if gf.series_form.is_some() && gf.numerator_nonnegative() {
            gf.combinatorial = Combinatorial::Inferred;
        }
        Ok(gf)
    }

    pub fn g(&self) -> &MultiPoly {
        &self.g
    }

    pub fn h(&self) -> &MultiPoly {
        &self.h
    }

    /// Number of tracked variables.
    pub fn d(&self) -> usize {
        self.zvars.len()
    }

    pub fn zvars(&self) -> &[String] {
        &self.zvars
    }

    pub fn combinatorial(&self) -> Combinatorial {
        self.combinatorial
    }

    /// Marks the coefficients as known to be non-negative (up to finitely
    /// many exceptions).
    pub fn assert_combinatorial(mut self) -> Self {
        if self.combinatorial == Combinatorial::Unknown {
            self.combinatorial = Combinatorial::Asserted;
        }
        self
    }

    pub fn linear_family(&self) -> Option<&LinearFamily> {
        self.linear_family.as_ref()
    }

    pub fn series_form(&self) -> Option<&SeriesForm> {
        self.series_form.as_ref()
    }

    /// Bindings `z_k := 1` for every tracked variable.
    pub fn ones(&self) -> BTreeMap<String, BigRational> {
        self.zvars
            .iter()
            .map(|v| (v.clone(), BigRational::one()))
            .collect()
    }

    /// `p(1, …, 1, t)` as a univariate polynomial.
    pub fn at_ones(&self, p: &MultiPoly) -> UPoly {
        p.univariate_in(T, &self.ones())
            .expect("all tracked variables are bound")
    }

    /// The univariate denominator `P(t) = H(1, …, 1, t)`.
    pub fn p(&self) -> UPoly {
        self.at_ones(&self.h)
    }

    /// Coefficients of `H` grouped by z-exponent, each a polynomial in `t`.
    pub fn h_by_z(&self) -> BTreeMap<Vec<u32>, UPoly> {
        collect_z(&self.h, &self.zvars)
    }

    fn detect_linear_family(&self) -> Option<LinearFamily> {
        let d = self.d();
        let mut q_list = vec![UPoly::zero(); d];
        let mut q = UPoly::one();
        for (alpha, c) in self.h_by_z() {
            let deg: u32 = alpha.iter().sum();
            match deg {
                0 => q = q.sub(&c),
                1 => {
                    let k = alpha.iter().position(|&e| e == 1).unwrap();
                    q_list[k] = c.neg();
                }
                _ => return None,
            }
        }
        if q_list.iter().any(|qk| qk.is_zero() || !qk.coeff(0).is_zero()) {
            return None;
        }
        if !q.coeff(0).is_zero() {
            return None;
        }
        Some(LinearFamily {
            q_vanishes: q.is_zero(),
            q,
            q_list,
        })
    }

    fn detect_series_form(&self) -> Option<SeriesForm> {
        let by_z = self.h_by_z();
        let zero_key = vec![0u32; self.d()];
        let c0 = by_z.get(&zero_key).cloned().unwrap_or_else(UPoly::zero);
        let mut g = UPoly::zero();
        for (alpha, c) in &by_z {
            if alpha != &zero_key {
                g = g.gcd(c);
            }
        }
        let mut candidates = vec![UPoly::one()];
        if !g.is_zero() {
            let low = g.low_degree().unwrap_or(0);
            let stripped = UPoly::from_coeffs(g.coeffs()[low..].to_vec());
            let u = stripped.scale(&stripped.coeff(0).recip());
            if !u.is_constant() {
                candidates.push(u);
            }
        }
        for u in candidates {
            if let Some(sf) = try_series_form(&by_z, &zero_key, &c0, &u) {
                return Some(sf);
            }
        }
        None
    }

    /// Sufficient test that every coefficient of `G / u` is non-negative.
    fn numerator_nonnegative(&self) -> bool {
        let u = &self.series_form.as_ref().unwrap().u;
        collect_z(&self.g, &self.zvars)
            .values()
            .all(|c| quotient_nonnegative(c, u))
    }
}

fn is_zvar(v: &str) -> bool {
    v.strip_prefix('z')
        .is_some_and(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))
}

fn collect_z(p: &MultiPoly, zvars: &[String]) -> BTreeMap<Vec<u32>, UPoly> {
    p.collect_by(zvars)
        .into_iter()
        .map(|(k, c)| (k, c.to_upoly(T).expect("coefficients depend on t only")))
        .collect()
}

fn try_series_form(
    by_z: &BTreeMap<Vec<u32>, UPoly>,
    zero_key: &[u32],
    c0: &UPoly,
    u: &UPoly,
) -> Option<SeriesForm> {
    let mut z_terms = BTreeMap::new();
    for (alpha, c) in by_z {
        if alpha.as_slice() == zero_key {
            continue;
        }
        let (quo, rem) = c.neg().div_rem(u);
        if !rem.is_zero() || quo.coeffs().iter().any(|x| x.is_negative()) {
            return None;
        }
        z_terms.insert(alpha.clone(), quo);
    }
    let n0 = u.sub(c0);
    if !quotient_nonnegative(&n0, u) {
        return None;
    }
    Some(SeriesForm {
        u: u.clone(),
        z_terms,
        n0,
    })
}

/// Sufficient test that the power series `n / u` has non-negative
/// coefficients, for `u(0) = 1`: every square-free factor of `u` must be
/// `1 − w` with `w ≥ 0`, and `n / f` must be non-negative up to degree
/// `deg n` for the first factor `f` (later coefficients then follow from
/// the recurrence, and further divisions by `1 − w` keep signs). Common
/// factors of `n` and `u` are cancelled first.
fn quotient_nonnegative(n: &UPoly, u: &UPoly) -> bool {
    if n.is_zero() {
        return true;
    }
    let common = n.gcd(u);
    let common = common.scale(&common.coeff(0).recip());
    let (n, u) = if common.is_constant() {
        (n.clone(), u.clone())
    } else {
        (n.exact_div(&common), u.exact_div(&common))
    };
    let (n, u) = (&n, &u);
    if u.is_constant() {
        return !u.coeff(0).is_negative() && n.coeffs().iter().all(|c| !c.is_negative());
    }
    let mut factors = Vec::new();
    for (f, mult) in u.square_free_factorization() {
        let f0 = f.coeff(0);
        if f0.is_zero() {
            return false;
        }
        let f = f.scale(&f0.recip());
        if f.coeffs()[1..].iter().any(|c| c.is_positive()) {
            return false;
        }
        for _ in 0..mult {
            factors.push(f.clone());
        }
    }
    let lc = u.coeff(0) / factors.iter().fold(BigRational::one(), |a, f| a * f.coeff(0));
    if lc.is_negative() {
        return false;
    }
    let deg = n.degree().unwrap();
    let head = series_div(n, &factors[0], deg);
    head.iter().all(|c| !c.is_negative())
}

/// First `order + 1` coefficients of the power series `n / u`, `u(0) ≠ 0`.
pub fn series_div(n: &UPoly, u: &UPoly, order: usize) -> Vec<BigRational> {
    let u0 = u.coeff(0);
    assert!(!u0.is_zero(), "series division by a polynomial vanishing at 0");
    let inv0 = u0.recip();
    let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = n.coeff(k);
        for j in 1..=k.min(u.degree().unwrap_or(0)) {
            acc -= u.coeff(j) * &out[k - j];
        }
        out.push(acc * &inv0);
    }
    out
}

impl fmt::Display for RationalGF {
    /// Prints in the input grammar; re-parsing gives the same `(G, H)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.g, self.h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UPoly {
        UPoly::from_ints(c)
    }

    #[test]
    fn permutation_denominator() {
        let gf = parse_gf("1/(1 - z1*t - z2*t^2)").unwrap();
        assert_eq!(gf.d(), 2);
        assert_eq!(gf.g().to_string(), "1");
        assert_eq!(gf.h().to_string(), "1 - z1*t - z2*t^2");
        let lf = gf.linear_family().unwrap();
        assert!(lf.q_vanishes);
        assert_eq!(lf.q_list, vec![up(&[0, 1]), up(&[0, 0, 1])]);
        assert_eq!(gf.combinatorial(), Combinatorial::Inferred);
    }

    #[test]
    fn clearing_a_tail_series() {
        let gf = parse_gf("1/(1 - z1*t - t^2/(1-t))").unwrap();
        assert_eq!(gf.d(), 1);
        assert_eq!(gf.g(), &parse_fraction("1 - t").unwrap().num);
        assert_eq!(
            gf.h(),
            &parse_fraction("1 - t - z1*t + z1*t^2 - t^2").unwrap().num
        );
        let lf = gf.linear_family().unwrap();
        assert_eq!(lf.q, up(&[0, 1, 1]));
        assert_eq!(lf.q_list, vec![up(&[0, 1, -1])]);
        let sf = gf.series_form().unwrap();
        assert_eq!(sf.u, up(&[1, -1]));
        assert_eq!(sf.n0, up(&[0, 0, 1]));
        assert_eq!(gf.combinatorial(), Combinatorial::Inferred);
    }

    #[test]
    fn univariate_geometric() {
        let gf = parse_gf("1/(1-t)").unwrap();
        assert_eq!(gf.d(), 0);
        assert_eq!(gf.h().to_string(), "1 - t");
    }

    #[test]
    fn normalization() {
        let gf = parse_gf("2*t/(4*t - 2*t*z1*t)").unwrap();
        assert_eq!(gf.g().to_string(), "1/2");
        assert_eq!(gf.h().to_string(), "1 - 1/2*z1*t");
        assert_eq!(
            parse_gf("1/t").unwrap_err(),
            ParseError::ZeroDenominatorAtOrigin
        );
        assert_eq!(parse_gf("1/(t + z1)").unwrap_err(), ParseError::ZeroDenominatorAtOrigin);
        assert_eq!(parse_gf("1 + t").unwrap_err(), ParseError::ConstantDenominator);
    }

    #[test]
    fn cross_terms_are_not_linear() {
        let gf = parse_gf("1/(1 - z1*z2*t)").unwrap();
        assert!(gf.linear_family().is_none());
        assert!(gf.series_form().is_some());
    }

    #[test]
    fn round_trip() {
        for s in [
            "1/(1 - z1*t - z2*t^2)",
            "1/(1 - z1*t - t^2/(1-t))",
            "(1 + 3/4*z1)/(1 - 2*t + 99/100*z1*t^2)",
        ] {
            let gf = parse_gf(s).unwrap();
            let again = parse_gf(&gf.to_string()).unwrap();
            assert_eq!(gf, again);
            assert_eq!(gf.g().to_string(), again.g().to_string());
            assert_eq!(gf.h().to_string(), again.h().to_string());
        }
    }

    #[test]
    fn nonnegative_quotients() {
        // t^2 / (1 - t)^2 and (1 - t + t^2) / (1 - 2t)
        assert!(quotient_nonnegative(&up(&[0, 0, 1]), &up(&[1, -2, 1])));
        assert!(quotient_nonnegative(&up(&[1, -1, 1]), &up(&[1, -2])));
        // 1 - 2t over 1 - t has coefficients 1, -1, -1, ...
        assert!(!quotient_nonnegative(&up(&[1, -2]), &up(&[1, -1])));
        // 1 / (1 + t) alternates
        assert!(!quotient_nonnegative(&up(&[1]), &up(&[1, 1])));
        // t^2 (1 - t)(2 - t) / (1 - t)^3 = (2t^2 - t^3) / (1 - t)^2
        let n = up(&[0, 0, 1]).mul(&up(&[1, -1])).mul(&up(&[2, -1]));
        assert!(quotient_nonnegative(&n, &up(&[1, -1]).pow(3)));
    }

    #[test]
    fn squared_denominators_keep_the_series_form() {
        let gf = parse_gf("1/(1 - z1*t - t^2/(1-t) - t^2/(1-t)^2)").unwrap();
        let sf = gf.series_form().unwrap();
        assert_eq!(sf.u, up(&[1, -1]).pow(3));
        assert_eq!(gf.combinatorial(), Combinatorial::Inferred);
    }

    #[test]
    fn signed_denominator_has_no_series_form() {
        let gf = parse_gf("1/(1 - 2*t + 99/100*z1*t^2)").unwrap();
        assert!(gf.series_form().is_none());
        assert_eq!(gf.combinatorial(), Combinatorial::Unknown);
        assert!(gf.assert_combinatorial().combinatorial().holds());
    }
}
