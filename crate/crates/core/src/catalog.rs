//! Generating functions of the shipped example families.

use std::fmt;
use std::str::FromStr;

use crate::gfparse::{parse_gf, ParseError, RationalGF};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Permutations,
    Strings,
    Compositions,
    CompositionsRestricted,
    Ncolour,
    TutteWheel,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Permutations,
        Family::Strings,
        Family::Compositions,
        Family::CompositionsRestricted,
        Family::Ncolour,
        Family::TutteWheel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Permutations => "permutations",
            Family::Strings => "strings",
            Family::Compositions => "compositions",
            Family::CompositionsRestricted => "compositions_restricted",
            Family::Ncolour => "ncolour",
            Family::TutteWheel => "tutte_wheel",
        }
    }

    fn parameters(self) -> &'static str {
        match self {
            Family::Permutations => "--d D [--no-set-z1]",
            Family::Strings => "--l L --d D",
            Family::Compositions => "--d D",
            Family::CompositionsRestricted => "--omega W1,W2,.. [--lambda L1,L2,..]",
            Family::Ncolour => "--d D",
            Family::TutteWheel => "",
        }
    }

    fn description(self) -> &'static str {
        match self {
            Family::Permutations => {
                "restricted permutations with cycles of length at most d+1, z_k counting \
                 k-cycles; LCLT for the cycle counts of lengths 2..d+1. z1 (fixed points) is set to 1 \
                 by default: with every cycle length tracked the counts lie on a hyperplane \
                 and the phase Hessian is singular"
            }
            Family::Strings => "words over L letters, z_k counting occurrences of letter k ≤ d",
            Family::Compositions => {
                "integer compositions, z_k counting parts equal to k ≤ d; ρ = 1/2, \
                 m = (1/4, 1/8, …)"
            }
            Family::CompositionsRestricted => {
                "compositions with parts in Λ (all positive integers by default), \
                 z_k counting parts equal to ω_k"
            }
            Family::Ncolour => "n-colour compositions, z_k counting parts equal to k ≤ d",
            Family::TutteWheel => "Tutte polynomials T_n(z1, z2) of wheel graphs",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown example family {0:?}")]
    UnknownFamily(String),
    #[error("{family} needs {what}")]
    BadParameter { family: &'static str, what: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl CatalogError {
    pub fn code(&self) -> &'static str {
        match self {
            CatalogError::UnknownFamily(_) => "UNKNOWN_EXAMPLE",
            CatalogError::BadParameter { .. } => "BAD_PARAMETER",
            CatalogError::Parse(e) => e.code(),
        }
    }
}

/// A family together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleSpec {
    pub family: Family,
    pub d: Option<usize>,
    pub l: Option<usize>,
    pub omega: Vec<usize>,
    pub lambda: Option<Vec<usize>>,
    /// Permutations only: substitute `z1 := 1`.
    pub set_z1: bool,
}

impl ExampleSpec {
    pub fn new(family: Family) -> Self {
        ExampleSpec {
            family,
            d: None,
            l: None,
            omega: Vec::new(),
            lambda: None,
            set_z1: true,
        }
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }

    pub fn with_omega(mut self, omega: Vec<usize>) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_lambda(mut self, lambda: Vec<usize>) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_set_z1(mut self, set_z1: bool) -> Self {
        self.set_z1 = set_z1;
        self
    }

    fn bad(&self, what: impl Into<String>) -> CatalogError {
        CatalogError::BadParameter {
            family: self.family.name(),
            what: what.into(),
        }
    }

    fn need_d(&self) -> Result<usize, CatalogError> {
        match self.d {
            Some(d) if d >= 1 => Ok(d),
            _ => Err(self.bad("--d with d ≥ 1")),
        }
    }

    /// The generating function as an input expression.
    pub fn expression(&self) -> Result<String, CatalogError> {
        match self.family {
            Family::Permutations => {
                let d = self.need_d()?;
                let first = if self.set_z1 { "t".to_string() } else { "z1*t".to_string() };
                let rest: Vec<String> = (2..=d + 1).map(|k| format!("z{k}*t^{k}")).collect();
                Ok(format!("1/(1 - {first} - {})", rest.join(" - ")))
            }
            Family::Strings => {
                let d = self.need_d()?;
                let l = self.l.ok_or_else(|| self.bad("--l"))?;
                if l < d {
                    return Err(self.bad("--l at least --d"));
                }
                let zs: Vec<String> = (1..=d).map(|k| format!("z{k}")).collect();
                Ok(format!("1/(1 - ({})*t - {}*t)", zs.join(" + "), l - d))
            }
            Family::Compositions => {
                let d = self.need_d()?;
                let zs: Vec<String> = (1..=d).map(|k| format!("z{k}*t^{k}")).collect();
                Ok(format!("1/(1 - {} - t^{}/(1-t))", zs.join(" - "), d + 1))
            }
            Family::CompositionsRestricted => {
                if self.omega.is_empty() || self.omega.contains(&0) {
                    return Err(self.bad("--omega, a non-empty list of positive integers"));
                }
                let tracked: Vec<String> = self
                    .omega
                    .iter()
                    .enumerate()
                    .map(|(k, w)| format!("(z{}-1)*t^{w}", k + 1))
                    .collect();
                let allowed = match &self.lambda {
                    None => "t/(1-t)".to_string(),
                    Some(lambda) => {
                        if lambda.is_empty() || lambda.contains(&0) {
                            return Err(self.bad("--lambda, a non-empty list of positive integers"));
                        }
                        if let Some(w) = self.omega.iter().find(|w| !lambda.contains(w)) {
                            return Err(self.bad(format!("every tracked part in --lambda ({w} is missing)")));
                        }
                        let terms: Vec<String> = lambda.iter().map(|k| format!("t^{k}")).collect();
                        format!("({})", terms.join(" + "))
                    }
                };
                Ok(format!("1/(1 - {} - {allowed})", tracked.join(" - ")))
            }
            Family::Ncolour => {
                let d = self.need_d()?;
                let zs: Vec<String> = (1..=d).map(|k| format!("{k}*z{k}*t^{k}")).collect();
                Ok(format!(
                    "1/(1 - {} - {d}*t^{e}/(1-t) - t^{e}/(1-t)^2)",
                    zs.join(" - "),
                    e = d + 1
                ))
            }
            Family::TutteWheel => Ok(
                "((1 - z1 + (z1*z2 - z2 - 1)*t)*(1 - z2 + (z1*z2 - z1 - 1)*t) - z1*z2*t + (z1 + z2)*t)\
                 /((1-t)*(1 - (z1 + z2 + 1)*t + z1*z2*t^2))"
                    .to_string(),
            ),
        }
    }

    pub fn build(&self) -> Result<RationalGF, CatalogError> {
        Ok(parse_gf(&self.expression()?)?)
    }
}

/// Human-readable listing of the families.
pub fn catalog_text() -> String {
    let mut out = String::new();
    for f in Family::ALL {
        out.push_str(&format!("{:<24} {}\n", f.name(), f.parameters()));
        out.push_str(&format!("    {}\n", f.description()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::expand;
    use crate::smoothacsv::{assemble_certificate, CertOptions, Verdict};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn expressions() {
        let e = |s: ExampleSpec| s.expression().unwrap();
        assert_eq!(
            e(ExampleSpec::new(Family::Permutations).with_d(2)),
            "1/(1 - t - z2*t^2 - z3*t^3)"
        );
        assert_eq!(
            e(ExampleSpec::new(Family::Permutations).with_d(1).with_set_z1(false)),
            "1/(1 - z1*t - z2*t^2)"
        );
        assert_eq!(
            e(ExampleSpec::new(Family::Strings).with_l(2).with_d(1)),
            "1/(1 - (z1)*t - 1*t)"
        );
        assert_eq!(
            e(ExampleSpec::new(Family::CompositionsRestricted)
                .with_omega(vec![2])
                .with_lambda(vec![1, 2, 3])),
            "1/(1 - (z1-1)*t^2 - (t^1 + t^2 + t^3))"
        );
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(
            ExampleSpec::new(Family::Compositions).build().unwrap_err().code(),
            "BAD_PARAMETER"
        );
        assert!("nope".parse::<Family>().is_err());
        assert_eq!("tutte_wheel".parse::<Family>().unwrap(), Family::TutteWheel);
        let missing = ExampleSpec::new(Family::CompositionsRestricted)
            .with_omega(vec![4])
            .with_lambda(vec![1, 2]);
        assert!(missing.build().is_err());
    }

    #[test]
    fn permutation_variables_keep_their_names() {
        let gf = ExampleSpec::new(Family::Permutations).with_d(2).build().unwrap();
        assert_eq!(gf.zvars(), ["z2", "z3"]);
    }

    #[test]
    fn ncolour_counts() {
        let gf = ExampleSpec::new(Family::Ncolour).with_d(1).build().unwrap();
        let t = expand(&gf, 6).unwrap();
        // 1, 1, 3, 8, 21, 55, 144
        let totals: Vec<BigRational> = (0..=6).map(|n| t.slice_total(n).unwrap()).collect();
        let want: Vec<BigRational> = [1, 1, 3, 8, 21, 55, 144].iter().map(|&x| q(x, 1)).collect();
        assert_eq!(totals, want);
    }

    #[test]
    fn tutte_wheel_coefficients() {
        let gf = ExampleSpec::new(Family::TutteWheel).build().unwrap();
        let t = expand(&gf, 5).unwrap();
        // T_1 = xy, T_2 = x^2 + y^2 + xy + x + y
        assert_eq!(t.coefficient(&[1, 1], 1), Some(q(1, 1)));
        assert_eq!(t.slice_total(1), Some(q(1, 1)));
        assert_eq!(t.slice_total(2), Some(q(5, 1)));
        assert_eq!(t.coefficient(&[2, 0], 2), Some(q(1, 1)));
        // T_n(1,1) counts spanning trees of the wheel: 16 for the 4-vertex wheel
        assert_eq!(t.slice_total(3), Some(q(16, 1)));
        assert_eq!(t.slice_total(4), Some(q(45, 1)));
    }

    #[test]
    fn compositions_closed_forms() {
        for d in 1..=4usize {
            let gf = ExampleSpec::new(Family::Compositions).with_d(d).build().unwrap();
            let cert = assemble_certificate(&gf, &CertOptions::default()).unwrap();
            assert_eq!(cert.verdict, Verdict::Proved);
            for j in 1..=d {
                let m = cert.m[j - 1].exact().unwrap().clone();
                assert_eq!(m, q(1, 1 << (j + 1)));
                for i in 1..=d {
                    let h = cert.hessian.get(i - 1, j - 1).exact().unwrap().clone();
                    let (ii, jj) = (i as i64, j as i64);
                    let want = if i == j {
                        q((1 << (j + 1)) - 2 * jj + 3, 1 << (2 * (j + 1)))
                    } else {
                        q(-(ii + jj - 3), 1 << (i + j + 2))
                    };
                    assert_eq!(h, want, "H[{i}][{j}] for d = {d}");
                }
            }
        }
    }

    #[test]
    fn listing_mentions_every_family() {
        let text = catalog_text();
        for f in Family::ALL {
            assert!(text.contains(f.name()));
        }
        assert!(text.contains("z1"));
    }
}
