//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::IntervalValue;
use super::upoly::UPoly;
use super::PolyError;

/// Exponent vector, one entry per roster variable.
///
/// Ordered by total degree, then lexicographically, so iteration of a term
/// map runs from the constant term upwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sort key placing `z1, z2, ...` by index, then `t`, then anything else.
pub fn var_order_key(name: &str) -> (u8, u64, String) {
    if name == "t" {
        return (1, 0, String::new());
    }
    if let Some(idx) = name.strip_prefix('z').and_then(|s| s.parse::<u64>().ok()) {
        return (0, idx, String::new());
    }
    (2, 0, name.to_string())
}

fn sort_roster(vars: &mut Vec<String>) {
    vars.sort_by_key(|v| var_order_key(v));
    vars.dedup();
}

#[derive(Clone, Debug)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialEq for MultiPoly {
    /// Equality of the polynomial functions; unused roster entries are
    /// ignored.
    fn eq(&self, other: &Self) -> bool {
        let a = self.trimmed();
        let b = other.trimmed();
        a.vars == b.vars && a.terms == b.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(vars: &[&str]) -> Self {
        let mut v: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        sort_roster(&mut v);
        MultiPoly {
            vars: v,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(0), c);
        }
        MultiPoly {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(vec![1]), BigRational::one());
        MultiPoly {
            vars: vec![name.to_string()],
            terms,
        }
    }

    /// Builds from `(coefficient, exponents)` pairs over an explicit roster;
    /// the roster is sorted into canonical variable order.
    pub fn from_terms(vars: &[&str], terms: Vec<(BigRational, Vec<u32>)>) -> Self {
        let given: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let mut sorted = given.clone();
        sort_roster(&mut sorted);
        assert_eq!(sorted.len(), given.len(), "duplicate variable in roster");
        let perm: Vec<usize> = sorted
            .iter()
            .map(|v| given.iter().position(|g| g == v).unwrap())
            .collect();
        let mut map = BTreeMap::new();
        for (c, e) in terms {
            assert_eq!(e.len(), given.len(), "exponent vector length mismatch");
            let m = Monomial(perm.iter().map(|&i| e[i]).collect());
            add_term(&mut map, m, c);
        }
        MultiPoly {
            vars: sorted,
            terms: map,
        }
    }

    /// Builds a polynomial in `var` from a univariate one.
    pub fn from_upoly(p: &UPoly, var: &str) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                terms.insert(Monomial(vec![k as u32]), c.clone());
            }
        }
        MultiPoly {
            vars: vec![var.to_string()],
            terms,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Variables with a nonzero exponent in some term.
    pub fn used_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .map(|i| self.vars[i].clone())
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::one(self.vars.len()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Drops roster entries no term uses.
    pub fn trimmed(&self) -> MultiPoly {
        let used = self.used_vars();
        if used.len() == self.vars.len() {
            return self.clone();
        }
        self.with_roster(&used)
    }

    /// Re-expresses over `roster`, which must contain every used variable.
    pub fn with_roster(&self, roster: &[String]) -> MultiPoly {
        let mut target = roster.to_vec();
        sort_roster(&mut target);
        let map_idx: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v))
            .collect();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                match map_idx[i] {
                    Some(j) => e[j] = x,
                    None => assert_eq!(x, 0, "variable {} dropped from roster", self.vars[i]),
                }
            }
            terms.insert(Monomial(e), c.clone());
        }
        MultiPoly {
            vars: target,
            terms,
        }
    }

    fn aligned(&self, other: &MultiPoly) -> (MultiPoly, MultiPoly) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let mut roster = self.vars.clone();
        roster.extend(other.vars.iter().cloned());
        sort_roster(&mut roster);
        (self.with_roster(&roster), other.with_roster(&roster))
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let (mut a, b) = self.aligned(other);
        for (m, c) in b.terms {
            add_term(&mut a.terms, m, c);
        }
        a
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly {
                vars: self.vars.clone(),
                terms: BTreeMap::new(),
            };
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let (a, b) = self.aligned(other);
        let mut terms = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                add_term(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        MultiPoly {
            vars: a.vars,
            terms,
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::from_int(1).with_roster(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn partial_derivative(&self, var: &str) -> Result<MultiPoly, PolyError> {
        let i = self
            .var_index(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.to_string()))?;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut nm = m.0.clone();
            nm[i] -= 1;
            add_term(
                &mut terms,
                Monomial(nm),
                c * BigRational::from_integer(e.into()),
            );
        }
        Ok(MultiPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    /// Substitutes each bound variable by a polynomial (constants included).
    pub fn substitute(&self, bindings: &BTreeMap<String, MultiPoly>) -> MultiPoly {
        if bindings.is_empty() {
            return self.clone();
        }
        let kept: Vec<usize> = (0..self.vars.len())
            .filter(|&i| !bindings.contains_key(&self.vars[i]))
            .collect();
        let kept_names: Vec<String> = kept.iter().map(|&i| self.vars[i].clone()).collect();
        let mut result = MultiPoly {
            vars: kept_names.clone(),
            terms: BTreeMap::new(),
        };
        let mut power_cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let base_exps: Vec<u32> = kept.iter().map(|&i| m.0[i]).collect();
            let mut term = MultiPoly {
                vars: kept_names.clone(),
                terms: BTreeMap::from([(Monomial(base_exps), c.clone())]),
            };
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Some(b) = bindings.get(&self.vars[i]) {
                    let p = power_cache
                        .entry((i, e))
                        .or_insert_with(|| b.pow(e))
                        .clone();
                    term = term.mul(&p);
                }
            }
            result = result.add(&term);
        }
        result
    }

    /// Substitutes rational values for some variables.
    pub fn substitute_values(&self, values: &BTreeMap<String, BigRational>) -> MultiPoly {
        let b = values
            .iter()
            .map(|(k, v)| (k.clone(), MultiPoly::constant(v.clone())))
            .collect();
        self.substitute(&b)
    }

    pub fn eval(&self, point: &BTreeMap<String, BigRational>) -> Result<BigRational, PolyError> {
        let vals = self.roster_values(point)?;
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= vals[i].unwrap();
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Conservative enclosure of the polynomial over a box.
    pub fn eval_interval(
        &self,
        bx: &BTreeMap<String, IntervalValue>,
    ) -> Result<IntervalValue, PolyError> {
        let mut vals = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match bx.get(v) {
                Some(x) => vals.push(Some(x.clone())),
                None if self.terms.keys().all(|m| m.0[i] == 0) => vals.push(None),
                None => return Err(PolyError::MissingBinding(v.clone())),
            }
        }
        let mut acc = IntervalValue::zero();
        for (m, c) in &self.terms {
            let mut t = IntervalValue::point(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &vals[i].as_ref().unwrap().pow(e);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn roster_values<'a>(
        &self,
        point: &'a BTreeMap<String, BigRational>,
    ) -> Result<Vec<Option<&'a BigRational>>, PolyError> {
        let mut vals = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match point.get(v) {
                Some(x) => vals.push(Some(x)),
                None if self.terms.keys().all(|m| m.0[i] == 0) => vals.push(None),
                None => return Err(PolyError::MissingBinding(v.clone())),
            }
        }
        Ok(vals)
    }

    /// Fixes every variable except `var` to the given values and returns
    /// the resulting univariate polynomial in `var`.
    pub fn univariate_in(
        &self,
        var: &str,
        fixed: &BTreeMap<String, BigRational>,
    ) -> Result<UPoly, PolyError> {
        let vi = self.var_index(var);
        let mut coeffs: Vec<BigRational> = Vec::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if Some(i) == vi || e == 0 {
                    continue;
                }
                let x = fixed
                    .get(&self.vars[i])
                    .ok_or_else(|| PolyError::MissingBinding(self.vars[i].clone()))?;
                for _ in 0..e {
                    t *= x;
                }
            }
            let k = vi.map(|i| m.0[i] as usize).unwrap_or(0);
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigRational::zero());
            }
            coeffs[k] += t;
        }
        Ok(UPoly::from_coeffs(coeffs))
    }

    /// Converts a polynomial that uses at most `var` into a [`UPoly`].
    pub fn to_upoly(&self, var: &str) -> Result<UPoly, PolyError> {
        if let Some(other) = self.used_vars().into_iter().find(|v| v != var) {
            return Err(PolyError::NotUnivariate(other));
        }
        self.univariate_in(var, &BTreeMap::new())
    }

    /// Groups terms by their exponents in `vars`, returning the coefficient
    /// polynomials (in the remaining variables).
    pub fn collect_by(&self, vars: &[String]) -> BTreeMap<Vec<u32>, MultiPoly> {
        let idx: Vec<Option<usize>> = vars.iter().map(|v| self.var_index(v)).collect();
        let rest: Vec<usize> = (0..self.vars.len())
            .filter(|i| !idx.contains(&Some(*i)))
            .collect();
        let rest_names: Vec<String> = rest.iter().map(|&i| self.vars[i].clone()).collect();
        let mut out: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = idx.iter().map(|i| i.map(|i| m.0[i]).unwrap_or(0)).collect();
            let e: Vec<u32> = rest.iter().map(|&i| m.0[i]).collect();
            let entry = out.entry(key).or_insert_with(|| MultiPoly {
                vars: rest_names.clone(),
                terms: BTreeMap::new(),
            });
            add_term(&mut entry.terms, Monomial(e), c.clone());
        }
        out
    }

    /// Divides every term by the monomial `exps` (which must divide each).
    pub fn div_monomial(&self, exps: &[u32]) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        Monomial(m.0.iter().zip(exps).map(|(a, b)| a - b).collect()),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Coordinate-wise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Vec<u32> {
        let mut out: Option<Vec<u32>> = None;
        for m in self.terms.keys() {
            out = Some(match out {
                None => m.0.clone(),
                Some(o) => o.iter().zip(&m.0).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        out.unwrap_or_else(|| vec![0; self.vars.len()])
    }

    /// True when every coefficient is non-negative.
    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

fn add_term(map: &mut BTreeMap<Monomial, BigRational>, m: Monomial, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Union of rosters in canonical order.
pub fn roster_union<'a>(polys: impl IntoIterator<Item = &'a MultiPoly>) -> Vec<String> {
    let set: BTreeSet<String> = polys
        .into_iter()
        .flat_map(|p| p.vars.iter().cloned())
        .collect();
    let mut v: Vec<String> = set.into_iter().collect();
    sort_roster(&mut v);
    v
}

impl fmt::Display for MultiPoly {
    /// Prints in the input grammar: `1 - z1*t - 3/4*z2*t^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(a.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> MultiPoly {
        MultiPoly::var("t")
    }
    fn z() -> MultiPoly {
        MultiPoly::var("z1")
    }
    fn c(i: i64) -> MultiPoly {
        MultiPoly::from_int(i)
    }

    #[test]
    fn additive_inverse_is_empty() {
        let s = t().add(&t().neg());
        assert!(s.is_zero());
        assert_eq!(s.num_terms(), 0);
    }

    #[test]
    fn difference_of_squares() {
        let p = c(1).sub(&t()).mul(&c(1).add(&t()));
        assert_eq!(p, c(1).sub(&t().pow(2)));
    }

    #[test]
    fn hand_expansion() {
        // (1 - t - z t^2)(1 + t) = 1 - t^2 - z t^2 - z t^3
        let h = c(1).sub(&t()).sub(&z().mul(&t().pow(2)));
        let p = h.mul(&c(1).add(&t()));
        let expected = c(1)
            .sub(&t().pow(2))
            .sub(&z().mul(&t().pow(2)))
            .sub(&z().mul(&t().pow(3)));
        assert_eq!(p, expected);
        assert_eq!(p.to_string(), "1 - t^2 - z1*t^2 - z1*t^3");
    }

    #[test]
    fn derivatives() {
        let h = c(1).sub(&t()).sub(&z().mul(&t().pow(2)));
        assert_eq!(
            h.partial_derivative("t").unwrap(),
            c(-1).sub(&c(2).mul(&z()).mul(&t()))
        );
        assert_eq!(h.partial_derivative("z1").unwrap(), t().pow(2).neg());
        assert!(c(1).with_roster(&["t".into()]).partial_derivative("t").unwrap().is_zero());
        assert!(matches!(
            h.partial_derivative("z9"),
            Err(PolyError::UnknownVariable(_))
        ));
    }

    #[test]
    fn substitution_at_one() {
        let z2 = MultiPoly::var("z2");
        let h = c(1).sub(&z().mul(&t())).sub(&z2.mul(&t().pow(2)));
        let ones: BTreeMap<String, BigRational> = [("z1", 1), ("z2", 1)]
            .iter()
            .map(|(k, v)| (k.to_string(), BigRational::from_integer((*v).into())))
            .collect();
        let p = h.substitute_values(&ones);
        assert_eq!(p, c(1).sub(&t()).sub(&t().pow(2)));
        assert_eq!(p.vars(), &["t".to_string()]);
        assert_eq!(h.substitute(&BTreeMap::new()), h);
    }

    #[test]
    fn interval_evaluation_at_exact_root() {
        let p = c(1).sub(&c(2).mul(&t()));
        let half = BigRational::new(1.into(), 2.into());
        let bx = BTreeMap::from([("t".to_string(), IntervalValue::point(half))]);
        assert_eq!(p.eval_interval(&bx).unwrap(), IntervalValue::zero());
    }

    #[test]
    fn squares_over_symmetric_box() {
        let p = t().pow(2);
        let bx = BTreeMap::from([(
            "t".to_string(),
            IntervalValue::new(BigRational::from_integer((-1).into()), BigRational::one()),
        )]);
        let e = p.eval_interval(&bx).unwrap();
        assert!(e.lo() <= &BigRational::zero() && e.hi() >= &BigRational::one());
    }

    #[test]
    fn roster_is_canonical() {
        let p = MultiPoly::var("t").add(&MultiPoly::var("z10")).add(&MultiPoly::var("z2"));
        assert_eq!(p.vars(), &["z2", "z10", "t"]);
    }
}
