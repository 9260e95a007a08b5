//! Certification of smooth minimal critical points and assembly of the
//! local central limit theorem certificate.

pub mod aperiodic;
pub mod hessian;
pub mod segment;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::gfparse::{Combinatorial, RationalGF};
use crate::linfam::{self, LuSummary};
use crate::numfmt;
use crate::polycore::{IntervalValue, Matrix, RatFunc, Scalar};
use crate::realroots::{smallest_positive_root, AlgebraicNumber, RootError};

pub use aperiodic::{aperiodicity_strictness, lattice_index, StrictMinimality};
pub use hessian::{criticality_residuals, direction_and_hessian, leading_constant, CriticalData};
pub use segment::{segment_minimality, segment_polynomial, Minimality};

/// Significant digits of decimal leaves in the certificate JSON.
pub const DIGITS: usize = 30;

pub const SLICE_HINT: &str =
    "coefficients may be supported on a lower-dimensional slice; consider setting a tracked variable to 1";

#[derive(Clone, Debug, thiserror::Error)]
pub enum CertError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("H_t vanishes at the critical point")]
    HtVanishes,
    #[error("G vanishes at the critical point")]
    GVanishes,
    #[error("phase Hessian is singular: {SLICE_HINT}")]
    DegenerateHessian(Box<LcltCertificate>),
    #[error("could not certify {0} at the available precision")]
    Indeterminate(String),
}

impl CertError {
    pub fn code(&self) -> &'static str {
        match self {
            CertError::Root(e) => e.code(),
            CertError::HtVanishes => "HT_VANISHES",
            CertError::GVanishes => "G_VANISHES",
            CertError::DegenerateHessian(_) => "DEGENERATE_HESSIAN",
            CertError::Indeterminate(_) => "INDETERMINATE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nondegeneracy {
    Proved,
    Degenerate,
    Indeterminate,
}

impl Nondegeneracy {
    pub fn as_str(self) -> &'static str {
        match self {
            Nondegeneracy::Proved => "PROVED",
            Nondegeneracy::Degenerate => "DEGENERATE",
            Nondegeneracy::Indeterminate => "INDETERMINATE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    Conditional,
    Refuted,
    Degenerate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Proved => "PROVED",
            Verdict::Conditional => "CONDITIONAL",
            Verdict::Refuted => "REFUTED",
            Verdict::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statuses {
    pub minimal: Minimality,
    pub strictly_minimal: StrictMinimality,
    pub nondegenerate: Nondegeneracy,
    pub ht_nonzero: bool,
    pub g_nonzero: bool,
    pub combinatorial: Combinatorial,
    /// All leading principal minors certainly positive; informational.
    pub positive_definite: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct CertOptions {
    /// Target width of every interval-valued field.
    pub precision: BigRational,
    /// Subinterval budget of the segment test at irrational `ρ`.
    pub segment_budget: usize,
}

impl Default for CertOptions {
    fn default() -> Self {
        CertOptions {
            precision: default_precision(),
            segment_budget: 200_000,
        }
    }
}

/// `10^-30`.
pub fn default_precision() -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 30))
}

/// Certificate for `[z^s t^n] F ≈ ρ^{-n} C0 (2πn)^{-d/2} det(𝓗)^{-1/2}
/// exp(−(s − nm)ᵀ 𝓗⁻¹ (s − nm) / 2n)`.
#[derive(Clone, Debug)]
pub struct LcltCertificate {
    pub g_text: String,
    pub h_text: String,
    pub zvars: Vec<String>,
    pub rho: AlgebraicNumber,
    pub m: Vec<IntervalValue>,
    pub hessian: Matrix<IntervalValue>,
    pub hess_det: IntervalValue,
    pub hess_inv: Option<Matrix<IntervalValue>>,
    pub c0: IntervalValue,
    pub residuals: Vec<IntervalValue>,
    pub statuses: Statuses,
    pub verdict: Verdict,
    pub lu: Option<LuSummary>,
}

impl LcltCertificate {
    pub fn d(&self) -> usize {
        self.m.len()
    }

    /// True when every scalar field is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.rho.is_rational()
    }

    pub fn m_f64(&self) -> Vec<f64> {
        self.m.iter().map(|x| x.mid_f64()).collect()
    }

    pub fn hessian_f64(&self) -> Vec<Vec<f64>> {
        f64_matrix(&self.hessian)
    }

    pub fn hess_inv_f64(&self) -> Option<Vec<Vec<f64>>> {
        self.hess_inv.as_ref().map(f64_matrix)
    }

    /// `ln A_n` with `A_n = ρ^{-n} C0 (2πn)^{-d/2} det(𝓗)^{-1/2}`.
    pub fn ln_amplitude(&self, n: u64) -> f64 {
        let d = self.d() as f64;
        let nf = n as f64;
        -nf * ln_mid(self.rho.interval()) + ln_mid(&self.c0)
            - 0.5 * d * (2.0 * std::f64::consts::PI * nf).ln()
            - 0.5 * ln_mid(&self.hess_det)
    }

    /// The constant `C0 (2π)^{-d/2} det(𝓗)^{-1/2}` of `A_n`.
    pub fn amplitude_constant(&self) -> f64 {
        let d = self.d() as f64;
        (ln_mid(&self.c0) - 0.5 * d * (2.0 * std::f64::consts::PI).ln()
            - 0.5 * ln_mid(&self.hess_det))
        .exp()
            * self.c0.mid_f64().signum()
    }

    /// Model value at `(s, n)`; see [`density_at`].
    pub fn density(&self, n: u64, s: &[i64]) -> Option<Density> {
        density_at(self, n, s)
    }
}

fn ln_mid(x: &IntervalValue) -> f64 {
    numfmt::ln_abs(&x.midpoint())
}

fn f64_matrix(m: &Matrix<IntervalValue>) -> Vec<Vec<f64>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|x| x.mid_f64()).collect())
        .collect()
}

fn max_width(xs: impl IntoIterator<Item = IntervalValue>) -> BigRational {
    xs.into_iter()
        .map(|x| x.width())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

struct Evaluated {
    m: Vec<IntervalValue>,
    hessian: Matrix<IntervalValue>,
    det: IntervalValue,
    inv: Option<Matrix<IntervalValue>>,
    c0: IntervalValue,
    residuals: Vec<IntervalValue>,
}

fn evaluate(cd: &CriticalData, t: &IntervalValue, degenerate: bool) -> Result<Evaluated, CertError> {
    let (m, hessian) = direction_and_hessian(cd, t).ok_or(CertError::HtVanishes)?;
    let c0 = leading_constant(cd, t).ok_or(CertError::HtVanishes)?;
    let residuals = criticality_residuals(cd, t, &m);
    if degenerate {
        return Ok(Evaluated {
            m,
            hessian,
            det: IntervalValue::zero(),
            inv: None,
            c0,
            residuals,
        });
    }
    let (det, inv) = hessian
        .det_and_inverse()
        .map_err(|e| CertError::Indeterminate(format!("phase Hessian inverse ({})", e.code())))?;
    Ok(Evaluated {
        m,
        hessian,
        det,
        inv: Some(inv),
        c0,
        residuals,
    })
}

/// Exact test of `det 𝓗 = 0` at an irrational `ρ`: the determinant is
/// formed in `Q(t)` and its numerator tested against the defining
/// polynomial of `ρ`.
fn symbolic_det_vanishes(cd: &CriticalData, rho: &AlgebraicNumber) -> bool {
    let Some((_, h)) = direction_and_hessian(cd, &RatFunc::t()) else {
        return false;
    };
    match h.determinant() {
        Ok(det) => det.is_zero() || rho.vanishes(det.num()),
        Err(_) => false,
    }
}

/// Runs the full certification pipeline on `gf`.
pub fn assemble_certificate(gf: &RationalGF, opts: &CertOptions) -> Result<LcltCertificate, CertError> {
    let cd = CriticalData::new(gf);
    let slack = BigRational::new(BigInt::one(), BigInt::from(256));
    let mut rho = smallest_positive_root(&cd.p, &(&opts.precision * &slack))?;
    if rho.vanishes(&cd.ht) {
        return Err(CertError::HtVanishes);
    }
    if rho.vanishes(&cd.g1) {
        return Err(CertError::GVanishes);
    }

    let degenerate = match rho.exact() {
        Some(r) => {
            let t = IntervalValue::point(r.clone());
            let (_, h) = direction_and_hessian(&cd, &t).ok_or(CertError::HtVanishes)?;
            h.determinant().map(|x| x.is_certainly_zero()).unwrap_or(false)
        }
        None => symbolic_det_vanishes(&cd, &rho),
    };

    let mut ev = evaluate(&cd, rho.interval(), degenerate);
    for _ in 0..12 {
        if rho.is_rational() {
            break;
        }
        let ok = match &ev {
            Ok(e) => {
                let mut all = e.m.clone();
                all.extend(e.hessian.rows().iter().flatten().cloned());
                all.push(e.det.clone());
                all.push(e.c0.clone());
                if let Some(inv) = &e.inv {
                    all.extend(inv.rows().iter().flatten().cloned());
                }
                max_width(all) <= opts.precision
            }
            Err(CertError::Indeterminate(_)) => false,
            Err(_) => true,
        };
        if ok {
            break;
        }
        rho = rho.refine_bits(64);
        ev = evaluate(&cd, rho.interval(), degenerate);
    }
    let ev = ev?;

    let minimal = segment_minimality(gf, &rho, opts.segment_budget);
    let strictly_minimal = aperiodicity_strictness(gf);
    let nondegenerate = if degenerate {
        Nondegeneracy::Degenerate
    } else {
        Nondegeneracy::Proved
    };
    let positive_definite = if degenerate {
        None
    } else {
        ev.hessian.leading_principal_minors().ok().map(|ms| {
            if ms.iter().all(|x| x.certain_sign() == Some(std::cmp::Ordering::Greater)) {
                Some(true)
            } else if ms.iter().any(|x| {
                matches!(
                    x.certain_sign(),
                    Some(std::cmp::Ordering::Less) | Some(std::cmp::Ordering::Equal)
                )
            }) {
                Some(false)
            } else {
                None
            }
        })
    }
    .flatten();
    let statuses = Statuses {
        minimal,
        strictly_minimal,
        nondegenerate,
        ht_nonzero: true,
        g_nonzero: true,
        combinatorial: gf.combinatorial(),
        positive_definite,
    };
    let verdict = verdict_of(&statuses);
    let lu = gf
        .linear_family()
        .map(|_| linfam::lu_summary(gf, &rho, &opts.precision));
    let cert = LcltCertificate {
        g_text: gf.g().to_string(),
        h_text: gf.h().to_string(),
        zvars: gf.zvars().to_vec(),
        rho,
        m: ev.m,
        hessian: ev.hessian,
        hess_det: ev.det,
        hess_inv: ev.inv,
        c0: ev.c0,
        residuals: ev.residuals,
        statuses,
        verdict,
        lu,
    };
    if degenerate {
        return Err(CertError::DegenerateHessian(Box::new(cert)));
    }
    Ok(cert)
}

fn verdict_of(s: &Statuses) -> Verdict {
    if s.nondegenerate == Nondegeneracy::Degenerate {
        return Verdict::Degenerate;
    }
    if matches!(s.minimal, Minimality::Refuted { .. }) {
        return Verdict::Refuted;
    }
    if s.minimal == Minimality::Proved
        && s.strictly_minimal == StrictMinimality::ProvedAperiodic
        && s.nondegenerate == Nondegeneracy::Proved
        && s.ht_nonzero
        && s.g_nonzero
        && s.combinatorial.holds()
    {
        Verdict::Proved
    } else {
        Verdict::Conditional
    }
}

/// Model value `ρ^{-n} C0 (2πn)^{-d/2} det(𝓗)^{-1/2} v_n(s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Density {
    /// `ln |value|`, finite even when `value` over- or underflows.
    pub ln_abs: f64,
    pub sign: f64,
    pub value: f64,
    /// Bound on the relative error of `value` (and absolute error of
    /// `ln_abs`) from the interval fields and floating-point evaluation.
    pub rel_error: f64,
}

/// Evaluates the limit density at `(s, n)`. `None` for degenerate
/// certificates or `n = 0`.
pub fn density_at(cert: &LcltCertificate, n: u64, s: &[i64]) -> Option<Density> {
    let inv = cert.hess_inv.as_ref()?;
    if n == 0 || s.len() != cert.d() {
        return None;
    }
    let nr = BigRational::from_integer(BigInt::from(n));
    let dev: Vec<IntervalValue> = s
        .iter()
        .zip(&cert.m)
        .map(|(&si, mi)| &IntervalValue::from_int(si) - &(mi * &IntervalValue::point(nr.clone())))
        .collect();
    let qf = inv.quadratic_form(&dev);
    let expo = qf
        .checked_div(&IntervalValue::point(&nr * BigRational::from_integer(2.into())))
        .expect("n > 0");
    let ln_abs = cert.ln_amplitude(n) - expo.mid_f64();
    let rel = |x: &IntervalValue| -> f64 {
        let mag = x.lo().abs().min(x.hi().abs());
        if mag.is_zero() {
            return f64::INFINITY;
        }
        (x.width() / mag).to_f64().unwrap_or(f64::INFINITY)
    };
    let interval_err = (n as f64) * rel(cert.rho.interval())
        + rel(&cert.c0)
        + 0.5 * rel(&cert.hess_det)
        + expo.width_f64();
    let fp_err = 8.0 * f64::EPSILON * (1.0 + ln_abs.abs() + expo.mid_f64().abs());
    let err = interval_err + fp_err;
    let sign = cert.c0.mid_f64().signum();
    Some(Density {
        ln_abs,
        sign,
        value: sign * ln_abs.exp(),
        rel_error: err.exp_m1(),
    })
}

fn s(x: &IntervalValue) -> Value {
    Value::String(numfmt::interval_string(x, DIGITS))
}

fn matrix_json(m: &Matrix<IntervalValue>) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(s).collect()))
            .collect(),
    )
}

fn exact_str(x: &IntervalValue) -> Value {
    Value::String(x.exact().map(|v| v.to_string()).unwrap_or_default())
}

fn int_json(x: &BigRational) -> Value {
    match x.to_integer().to_i64() {
        Some(v) if x.is_integer() => json!(v),
        _ => Value::String(x.to_string()),
    }
}

/// Renders `-d/2` in lowest terms.
pub fn polynomial_order(d: usize) -> String {
    match d {
        0 => "0".into(),
        d if d % 2 == 0 => format!("-{}", d / 2),
        d => format!("-{d}/2"),
    }
}

impl LcltCertificate {
    pub fn to_json(&self) -> Value {
        let d = self.d();
        let ln2 = std::f64::consts::LN_2;
        let mut statuses = json!({
            "minimal": self.statuses.minimal.as_str(),
            "strictly_minimal": self.statuses.strictly_minimal.as_str(),
            "nondegenerate": self.statuses.nondegenerate.as_str(),
            "Ht_nonzero": self.statuses.ht_nonzero,
            "G_nonzero": self.statuses.g_nonzero,
            "combinatorial": self.statuses.combinatorial.as_str(),
            "positive_definite": self.statuses.positive_definite,
        });
        if let Minimality::Refuted { witness } = &self.statuses.minimal {
            statuses["minimality_witness"] =
                json!([witness.lo().to_string(), witness.hi().to_string()]);
        }
        let mut out = json!({
            "input": {
                "G": self.g_text,
                "H": self.h_text,
                "variables": self.zvars,
                "d": d,
            },
            "rho": {
                "minpoly": self.rho.minpoly().coeffs().iter().map(int_json).collect::<Vec<_>>(),
                "interval": [self.rho.interval().lo().to_string(), self.rho.interval().hi().to_string()],
                "decimal": self.rho.decimal(DIGITS),
            },
            "m": self.m.iter().map(s).collect::<Vec<_>>(),
            "hessian": matrix_json(&self.hessian),
            "hess_det": s(&self.hess_det),
            "hess_inv": self.hess_inv.as_ref().map(matrix_json).unwrap_or(Value::Null),
            "C0": s(&self.c0),
            "statuses": statuses,
            "amplitude": {
                "log2_growth_per_n": format!("{:.16e}", -ln_mid(self.rho.interval()) / ln2 + 0.0),
                "polynomial_order": polynomial_order(d),
                "constant": if self.hess_inv.is_some() {
                    format!("{:.16e}", self.amplitude_constant())
                } else {
                    String::new()
                },
            },
            "criticality_residuals": self.residuals.iter().map(s).collect::<Vec<_>>(),
            "verdict": self.verdict.as_str(),
        });
        if let Some(lu) = &self.lu {
            out["lu"] = lu.to_json();
        }
        if self.is_exact() {
            out["exact"] = json!({
                "rho": self.rho.exact().unwrap().to_string(),
                "m": self.m.iter().map(exact_str).collect::<Vec<_>>(),
                "hessian": self.hessian.rows().iter()
                    .map(|r| r.iter().map(exact_str).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "hess_det": exact_str(&self.hess_det),
                "hess_inv": self.hess_inv.as_ref().map(|m| m.rows().iter()
                    .map(|r| r.iter().map(exact_str).collect::<Vec<_>>()).collect::<Vec<_>>()),
                "C0": exact_str(&self.c0),
            });
        }
        out
    }
}

impl fmt::Display for LcltCertificate {
    /// Human-readable summary with the rendered limit statement.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d();
        let show = |x: &IntervalValue| numfmt::interval_string(x, 16);
        writeln!(f, "F = G/H with G = {}, H = {}", self.g_text, self.h_text)?;
        writeln!(f, "verdict: {}", self.verdict.as_str())?;
        writeln!(f, "rho = {}", self.rho.decimal(20))?;
        if self.is_exact() {
            writeln!(f, "    = {} (exact)", self.rho.exact().unwrap())?;
        }
        let ms: Vec<String> = self.m.iter().map(show).collect();
        writeln!(f, "m = [{}]", ms.join(", "))?;
        writeln!(f, "phase Hessian:")?;
        for r in self.hessian.rows() {
            let row: Vec<String> = r.iter().map(show).collect();
            writeln!(f, "    [{}]", row.join(", "))?;
        }
        writeln!(f, "det = {}", show(&self.hess_det))?;
        writeln!(f, "C0 = {}", show(&self.c0))?;
        writeln!(
            f,
            "statuses: minimal={} strictly_minimal={} nondegenerate={} Ht_nonzero={} G_nonzero={} combinatorial={}",
            self.statuses.minimal.as_str(),
            self.statuses.strictly_minimal.as_str(),
            self.statuses.nondegenerate.as_str(),
            self.statuses.ht_nonzero,
            self.statuses.g_nonzero,
            self.statuses.combinatorial.as_str(),
        )?;
        if self.hess_inv.is_some() {
            let vars: Vec<String> = (1..=d).map(|k| format!("s{k}")).collect();
            writeln!(
                f,
                "limit: [z^s t^n] F = A_n (exp(-(s - n m)^T H^-1 (s - n m) / (2n)) + o(1)) uniformly in s,"
            )?;
            writeln!(
                f,
                "       A_n = rho^-n * {:.16e} * n^({}),  s = ({})",
                self.amplitude_constant(),
                polynomial_order(d),
                vars.join(", ")
            )?;
        } else {
            writeln!(f, "note: {SLICE_HINT}")?;
        }
        Ok(())
    }
}
