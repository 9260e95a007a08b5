//! Closed forms for denominators `H = 1 − q(t) − Σ q_k(t) z_k`: the phase
//! Hessian, its determinant, and an explicit LU factorization `𝓗 U = L`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::gfparse::RationalGF;
use crate::numfmt;
use crate::polycore::{IntervalValue, Matrix, RatFunc, Scalar, UPoly};
use crate::realroots::AlgebraicNumber;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LinfamError {
    #[error("denominator is not linear in the tracked variables")]
    NotLinearFamily,
    #[error("LU pivot r_{j} vanishes")]
    RjVanishes { j: usize },
    #[error("a closed-form denominator vanishes or could not be certified nonzero")]
    Indeterminate,
}

impl LinfamError {
    pub fn code(&self) -> &'static str {
        match self {
            LinfamError::NotLinearFamily => "NOT_LINEAR_FAMILY",
            LinfamError::RjVanishes { .. } => "RJ_VANISHES",
            LinfamError::Indeterminate => "INDETERMINATE",
        }
    }
}

/// `q` and `q_1..q_d` as rational functions of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFamilyFunctions {
    pub q: RatFunc,
    pub q_list: Vec<RatFunc>,
}

impl LinearFamilyFunctions {
    /// Polynomial data read directly off `H`.
    pub fn cleared(gf: &RationalGF) -> Option<Self> {
        let lf = gf.linear_family()?;
        Some(LinearFamilyFunctions {
            q: RatFunc::from_poly(lf.q.clone()),
            q_list: lf.q_list.iter().cloned().map(RatFunc::from_poly).collect(),
        })
    }

    /// Undoes denominator clearing: with `H = u·(1 − q − Σ q_k z_k)`,
    /// `q_k = q̃_k / u` and `q = (u − 1 + q̃) / u`. Falls back to the
    /// cleared data when `H` has no series form.
    pub fn native(gf: &RationalGF) -> Option<Self> {
        let lf = gf.linear_family()?;
        let Some(sf) = gf.series_form() else {
            return Self::cleared(gf);
        };
        let u = &sf.u;
        let div = |p: &UPoly| RatFunc::new(p.clone(), u.clone()).expect("u is nonzero");
        Some(LinearFamilyFunctions {
            q: div(&u.sub(&UPoly::one()).add(&lf.q)),
            q_list: lf.q_list.iter().map(div).collect(),
        })
    }

    pub fn d(&self) -> usize {
        self.q_list.len()
    }

    /// `P = 1 − q − Σ q_k`.
    pub fn p(&self) -> RatFunc {
        let mut p = RatFunc::constant(BigRational::one()).sub(&self.q);
        for qk in &self.q_list {
            p = p.sub(qk);
        }
        p
    }
}

pub fn eval_ratfunc<S: Scalar>(f: &RatFunc, t: &S) -> Option<S> {
    S::eval_upoly(f.num(), t).checked_div(&S::eval_upoly(f.den(), t))
}

/// Scalars at `ρ` entering the closed forms.
#[derive(Clone, Debug)]
pub struct LinearFamilyData<S> {
    pub rho: S,
    pub p1: S,
    pub p2: S,
    pub q: S,
    pub q1: S,
    pub qk: Vec<S>,
    pub qk1: Vec<S>,
}

impl<S: Scalar> LinearFamilyData<S> {
    pub fn new(f: &LinearFamilyFunctions, rho: &S) -> Result<Self, LinfamError> {
        let ev = |g: &RatFunc| eval_ratfunc(g, rho).ok_or(LinfamError::Indeterminate);
        let p = f.p();
        let dp = p.derivative();
        Ok(LinearFamilyData {
            rho: rho.clone(),
            p1: ev(&dp)?,
            p2: ev(&dp.derivative())?,
            q: ev(&f.q)?,
            q1: ev(&f.q.derivative())?,
            qk: f.q_list.iter().map(ev).collect::<Result<_, _>>()?,
            qk1: f
                .q_list
                .iter()
                .map(|g| ev(&g.derivative()))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn d(&self) -> usize {
        self.qk.len()
    }

    fn div(a: &S, b: &S) -> Result<S, LinfamError> {
        a.checked_div(b).ok_or(LinfamError::Indeterminate)
    }

    /// Prefix sums `(A_j, B_j, D_j)` for `j = 1..=d+1` (index `j − 1`):
    /// sums over `k < j` of `q_k`, `q_k'` and `q_k'^2 / q_k`.
    pub fn prefix_sums(&self) -> Result<Vec<(S, S, S)>, LinfamError> {
        let mut out = vec![(S::zero(), S::zero(), S::zero())];
        for k in 0..self.d() {
            let (a, b, dd) = out.last().unwrap().clone();
            out.push((
                a.plus(&self.qk[k]),
                b.plus(&self.qk1[k]),
                dd.plus(&Self::div(&self.qk1[k].square(), &self.qk[k])?),
            ));
        }
        Ok(out)
    }

    /// Closed-form phase Hessian.
    pub fn hessian_closed_form(&self) -> Result<Matrix<S>, LinfamError> {
        let d = self.d();
        let rho = &self.rho;
        let den = rho.square().times(&self.p1.powi(3));
        let mut rows = vec![vec![S::zero(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let (qi, qj) = (&self.qk[i], &self.qk[j]);
                let (qi1, qj1) = (&self.qk1[i], &self.qk1[j]);
                let num = if i == j {
                    rho.times(&qj.square())
                        .times(&self.p2)
                        .minus(
                            &S::from_int(2)
                                .times(qj)
                                .times(qj1)
                                .times(rho)
                                .minus(&qj.square())
                                .times(&self.p1),
                        )
                        .minus(&qj.times(rho).times(&self.p1.square()))
                } else {
                    rho.times(qi)
                        .times(qj)
                        .times(&self.p2)
                        .minus(
                            &qj.times(qi1)
                                .times(rho)
                                .plus(&qi.times(qj1).times(rho))
                                .minus(&qi.times(qj))
                                .times(&self.p1),
                        )
                };
                rows[i][j] = Self::div(&num, &den)?;
            }
        }
        Ok(Matrix::from_rows(rows))
    }

    /// Closed-form determinant of the phase Hessian.
    pub fn det_closed_form(&self) -> Result<S, LinfamError> {
        let d = self.d();
        let rho = &self.rho;
        let mut prod = S::one();
        let mut dsum = S::zero();
        for k in 0..d {
            prod = prod.times(&self.qk[k]);
            dsum = dsum.plus(&Self::div(&self.qk1[k].square(), &self.qk[k])?);
        }
        let bracket = self
            .q
            .minus(&S::one())
            .times(&rho.times(&self.p2).plus(&self.p1).plus(&rho.times(&dsum)))
            .plus(&self.q1.square().times(rho));
        let mut num = prod.times(&bracket);
        if d % 2 == 1 {
            num = num.negate();
        }
        let den = self.p1.powi(d as u32 + 2).times(&rho.powi(d as u32 + 1));
        Self::div(&num, &den)
    }

    /// LU factors `U` (unit upper triangular) and `L` (lower triangular)
    /// with `𝓗 U = L`.
    pub fn lu_factors(&self) -> Result<LuFactors<S>, LinfamError> {
        let d = self.d();
        let rho = &self.rho;
        let (p1, p2) = (&self.p1, &self.p2);
        let pre = self.prefix_sums()?;
        let r: Vec<S> = pre
            .iter()
            .map(|(a, b, dd)| {
                p1.square()
                    .times(rho)
                    .minus(&p2.times(rho).times(a))
                    .plus(&S::from_int(2).times(p1).times(rho).times(b))
                    .minus(&p1.times(a))
                    .minus(&rho.times(&a.times(dd).minus(&b.square())))
            })
            .collect();
        for (j, rj) in r.iter().enumerate().take(d) {
            if rj.is_certainly_zero() {
                return Err(LinfamError::RjVanishes { j: j + 1 });
            }
            if !rj.is_certainly_nonzero() {
                return Err(LinfamError::Indeterminate);
            }
        }
        let ratio = |i: usize| Self::div(&self.qk1[i], &self.qk[i]);
        let mut u = Matrix::identity(d);
        let mut l = Matrix::zeros(d, d);
        let mut g = Matrix::zeros(d, d);
        let mut s = Matrix::zeros(d, d);
        for j in 0..d {
            let (a, b, dd) = &pre[j];
            let p1rho = p1.times(rho);
            for i in 0..j {
                // strictly upper entries
                let (qi, qi1) = (&self.qk[i], &self.qk1[i]);
                let cross = ratio(i)?.times(&ratio(j)?);
                let gij = p1
                    .plus(&p2.times(rho))
                    .minus(
                        &rho.times(&ratio(i)?.plus(&ratio(j)?))
                            .times(&p1.plus(b).minus(qi1)),
                    )
                    .plus(&rho.times(&dd.minus(&Self::div(&qi1.square(), qi)?)))
                    .plus(&rho.times(&cross).times(&a.minus(qi)));
                u.set(i, j, Self::div(&self.qk[j].times(&gij), &r[j])?);
                g.set(i, j, gij);
            }
            l.set(
                j,
                j,
                Self::div(&self.qk[j].times(&r[j + 1]).negate(), &p1rho.times(&r[j]))?,
            );
            for i in j + 1..d {
                let cross = ratio(i)?.times(&ratio(j)?);
                let sij = p2
                    .times(rho)
                    .plus(&rho.times(dd))
                    .minus(&rho.times(&ratio(i)?.plus(&ratio(j)?)).times(&p1.plus(b)))
                    .plus(p1)
                    .plus(&rho.times(&cross).times(a));
                l.set(
                    i,
                    j,
                    Self::div(
                        &self.qk[j].times(&self.qk[i]).times(&sij),
                        &p1rho.times(&r[j]),
                    )?,
                );
                s.set(i, j, sij);
            }
        }
        Ok(LuFactors { u, l, r, g, s })
    }
}

#[derive(Clone, Debug)]
pub struct LuFactors<S> {
    pub u: Matrix<S>,
    pub l: Matrix<S>,
    /// `r_1..r_{d+1}`.
    pub r: Vec<S>,
    /// `g_ij` for `i < j` (zero elsewhere).
    pub g: Matrix<S>,
    /// `s_ij` for `i > j` (zero elsewhere).
    pub s: Matrix<S>,
}

impl<S: Scalar> LuFactors<S> {
    /// `Π L_jj`, the determinant of `𝓗` when the factorization holds.
    pub fn diagonal_product(&self) -> S {
        (0..self.l.nrows()).fold(S::one(), |acc, j| acc.times(self.l.get(j, j)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LuCheck<S> {
    Verified,
    Residual { row: usize, col: usize, value: S },
}

/// Checks `𝓗 U − L = 0`: exactly for exact scalars, or by every entry's
/// enclosure containing zero.
pub fn verify_lu(hessian: &Matrix<IntervalValue>, f: &LuFactors<IntervalValue>) -> LuCheck<IntervalValue> {
    let res = hessian.mul(&f.u).sub(&f.l);
    for i in 0..res.nrows() {
        for j in 0..res.ncols() {
            let v = res.get(i, j);
            if !v.contains_zero() {
                return LuCheck::Residual {
                    row: i,
                    col: j,
                    value: v.clone(),
                };
            }
        }
    }
    LuCheck::Verified
}

/// Largest width among the entries of `𝓗 U − L`.
pub fn residual_width(hessian: &Matrix<IntervalValue>, f: &LuFactors<IntervalValue>) -> BigRational {
    let res = hessian.mul(&f.u).sub(&f.l);
    res.rows()
        .iter()
        .flatten()
        .map(|x| x.width())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

/// Outcome of the LU check attached to a certificate.
#[derive(Clone, Debug)]
pub struct LuSummary {
    pub verified: bool,
    pub l_diag: Vec<IntervalValue>,
    pub det_closed_form: Option<IntervalValue>,
    pub residual_width: BigRational,
    /// Error code when the factorization could not be formed.
    pub failure: Option<String>,
}

impl LuSummary {
    pub fn to_json(&self) -> Value {
        let s = |x: &IntervalValue| numfmt::interval_string(x, crate::smoothacsv::DIGITS);
        json!({
            "verified": self.verified,
            "L_diag": self.l_diag.iter().map(s).collect::<Vec<_>>(),
            "det_closed_form": self.det_closed_form.as_ref().map(s),
            "residual_width": numfmt::bound_string(&self.residual_width),
            "failure": self.failure,
        })
    }
}

/// Forms the closed-form Hessian and LU factors at `ρ` (refined so that
/// residual enclosures are narrower than `precision`) and checks
/// `𝓗 U = L`.
pub fn lu_summary(gf: &RationalGF, rho: &AlgebraicNumber, precision: &BigRational) -> LuSummary {
    let fail = |code: &str| LuSummary {
        verified: false,
        l_diag: Vec::new(),
        det_closed_form: None,
        residual_width: BigRational::zero(),
        failure: Some(code.to_string()),
    };
    let Some(f) = LinearFamilyFunctions::native(gf) else {
        return fail(LinfamError::NotLinearFamily.code());
    };
    let shrink = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 15));
    let mut rho = rho.refine(&(precision * &shrink));
    for _ in 0..6 {
        let attempt = (|| {
            let data = LinearFamilyData::new(&f, rho.interval())?;
            let h = data.hessian_closed_form()?;
            let lu = data.lu_factors()?;
            let det = data.det_closed_form()?;
            Ok::<_, LinfamError>((h, lu, det))
        })();
        match attempt {
            Ok((h, lu, det)) => {
                let width = residual_width(&h, &lu);
                if width >= *precision && !rho.is_rational() {
                    rho = rho.refine_bits(64);
                    continue;
                }
                return LuSummary {
                    verified: verify_lu(&h, &lu) == LuCheck::Verified,
                    l_diag: (0..lu.l.nrows()).map(|j| lu.l.get(j, j).clone()).collect(),
                    det_closed_form: Some(det),
                    residual_width: width,
                    failure: None,
                };
            }
            Err(LinfamError::Indeterminate) if !rho.is_rational() => {
                rho = rho.refine_bits(64);
            }
            Err(e) => return fail(e.code()),
        }
    }
    fail(LinfamError::Indeterminate.code())
}

/// Result of testing `z f'(z)^2 ≤ f(z) (z f''(z) + f'(z))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositivityCheck {
    pub holds: bool,
    pub equality: bool,
}

pub fn positivity_inequality_check(f: &UPoly, z: &BigRational) -> PositivityCheck {
    let f1 = f.derivative();
    let f2 = f1.derivative();
    let lhs = z * f1.eval(z) * f1.eval(z);
    let rhs = f.eval(z) * (z * f2.eval(z) + f1.eval(z));
    PositivityCheck {
        holds: lhs <= rhs,
        equality: lhs == rhs,
    }
}
