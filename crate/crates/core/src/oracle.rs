//! Exact power-series expansion of `F = G / H` and empirical statistics of
//! its coefficient slices.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::gfparse::{RationalGF, T};
use crate::numfmt;
use crate::smoothacsv::LcltCertificate;

pub const MEMORY_BUDGET_ENV: &str = "LCLT_MEMORY_BUDGET_MB";
const DEFAULT_BUDGET_MB: u64 = 2048;
/// Rough bytes per stored coefficient, used only for budgeting.
const BYTES_PER_ENTRY: u64 = 64;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("expansion needs about {required_mb} MB, budget is {budget_mb} MB")]
    BudgetExceeded { required_mb: u64, budget_mb: u64 },
    #[error("denominator has a t-free term in the tracked variables; slices are infinite")]
    UnboundedSlice,
    #[error("slice {0} is empty or was not stored")]
    EmptySlice(usize),
    #[error("certificate has no inverse Hessian")]
    DegenerateCertificate,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl OracleError {
    pub fn code(&self) -> &'static str {
        match self {
            OracleError::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
            OracleError::UnboundedSlice => "UNBOUNDED_SLICE",
            OracleError::EmptySlice(_) => "EMPTY_SLICE",
            OracleError::DegenerateCertificate => "DEGENERATE_CERTIFICATE",
            OracleError::Io(_) => "IO_ERROR",
        }
    }
}

/// Dense coefficients of `[t^n] F` over the box `0 ≤ s_k ≤ bounds[k]`,
/// row-major with `s_1` varying slowest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub n: usize,
    pub bounds: Vec<usize>,
    /// Scaled integer coefficients; see [`CoefficientTensor::scale`].
    pub data: Vec<BigInt>,
}

impl Slice {
    fn new(n: usize, bounds: Vec<usize>) -> Self {
        let len = bounds.iter().map(|b| b + 1).product();
        Slice {
            n,
            bounds,
            data: vec![BigInt::zero(); len],
        }
    }

    pub fn strides(&self) -> Vec<usize> {
        let d = self.bounds.len();
        let mut st = vec![1; d];
        for k in (0..d.saturating_sub(1)).rev() {
            st[k] = st[k + 1] * (self.bounds[k + 1] + 1);
        }
        st
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        if s.iter().zip(&self.bounds).any(|(a, b)| a > b) {
            return None;
        }
        Some(s.iter().zip(self.strides()).map(|(a, st)| a * st).sum())
    }

    pub fn point_of(&self, mut idx: usize) -> Vec<usize> {
        let st = self.strides();
        st.iter()
            .map(|&w| {
                let v = idx / w;
                idx %= w;
                v
            })
            .collect()
    }

    pub fn get(&self, s: &[usize]) -> BigInt {
        self.index_of(s)
            .map(|i| self.data[i].clone())
            .unwrap_or_else(BigInt::zero)
    }
}

/// Coefficients `f_{s,n}` of `F` for `n ≤ N`, stored as integers
/// `f̂_{s,n} = E·Dⁿ·f_{s,n}`.
#[derive(Clone, Debug)]
pub struct CoefficientTensor {
    pub d: usize,
    pub n_max: usize,
    /// `(E, D)`.
    pub scale: (BigInt, BigInt),
    slices: Vec<Option<Slice>>,
}

/// A term `c · z^a · t^b` of `H` or `G` with integer (scaled) coefficient.
#[derive(Clone, Debug)]
struct Term {
    a: Vec<usize>,
    b: usize,
    c: BigInt,
}

fn lcm_of_denominators<'a>(cs: impl Iterator<Item = &'a BigRational>) -> BigInt {
    cs.fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

fn terms_of(p: &crate::polycore::MultiPoly, zvars: &[String]) -> Vec<(Vec<usize>, usize, BigRational)> {
    let ti = p.var_index(T);
    let zi: Vec<Option<usize>> = zvars.iter().map(|z| p.var_index(z)).collect();
    p.terms()
        .map(|(m, c)| {
            let e = m.exps();
            let a = zi.iter().map(|i| i.map(|i| e[i] as usize).unwrap_or(0)).collect();
            let b = ti.map(|i| e[i] as usize).unwrap_or(0);
            (a, b, c.clone())
        })
        .collect()
}

/// Per-variable degree bounds of slice `n`.
struct Bounds {
    /// `max a_k / b` over the non-constant terms of `H`.
    ratios: Vec<BigRational>,
    g_terms: Vec<(Vec<usize>, usize)>,
}

impl Bounds {
    fn at(&self, n: usize) -> Vec<usize> {
        let d = self.ratios.len();
        let mut out = vec![0usize; d];
        for (alpha, b0) in &self.g_terms {
            if *b0 > n {
                continue;
            }
            let span = BigRational::from_integer(BigInt::from(n - b0));
            for k in 0..d {
                let v = alpha[k] + (&self.ratios[k] * &span).floor().to_integer().to_usize().unwrap();
                out[k] = out[k].max(v);
            }
        }
        out
    }
}

pub fn memory_budget_mb() -> u64 {
    std::env::var(MEMORY_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET_MB)
}

/// Expands `F` up to `t^N`, keeping every slice.
pub fn expand(gf: &RationalGF, n_max: usize) -> Result<CoefficientTensor, OracleError> {
    expand_keeping(gf, n_max, None)
}

/// Expands `F` up to `t^N`, keeping only the slices in `keep` (plus the
/// window the recurrence needs while running).
pub fn expand_keeping(
    gf: &RationalGF,
    n_max: usize,
    keep: Option<&BTreeSet<usize>>,
) -> Result<CoefficientTensor, OracleError> {
    let d = gf.d();
    let zv = gf.zvars();
    let h_raw = terms_of(gf.h(), zv);
    let g_raw = terms_of(gf.g(), zv);
    if h_raw.iter().any(|(a, b, _)| *b == 0 && a.iter().any(|&x| x > 0)) {
        return Err(OracleError::UnboundedSlice);
    }
    let dd = lcm_of_denominators(h_raw.iter().map(|x| &x.2));
    let ee = lcm_of_denominators(g_raw.iter().map(|x| &x.2));
    let dr = BigRational::from_integer(dd.clone());
    let er = BigRational::from_integer(ee.clone());
    // c_{a,b} = h_{a,b} D^b, integral for b ≥ 1
    let h_terms: Vec<Term> = h_raw
        .iter()
        .filter(|(_, b, _)| *b > 0)
        .map(|(a, b, c)| Term {
            a: a.clone(),
            b: *b,
            c: (c * num_traits::pow(dr.clone(), *b)).to_integer(),
        })
        .collect();
    let g_terms: Vec<Term> = g_raw
        .iter()
        .map(|(a, b, c)| Term {
            a: a.clone(),
            b: *b,
            c: (c * &er).to_integer(),
        })
        .collect();
    let mut ratios = vec![BigRational::zero(); d];
    for t in &h_terms {
        for k in 0..d {
            let r = BigRational::new(BigInt::from(t.a[k]), BigInt::from(t.b));
            if r > ratios[k] {
                ratios[k] = r;
            }
        }
    }
    let bounds = Bounds {
        ratios,
        g_terms: g_terms.iter().map(|t| (t.a.clone(), t.b)).collect(),
    };
    let window = h_terms.iter().map(|t| t.b).max().unwrap_or(0);

    let entries: u64 = (0..=n_max)
        .filter(|n| keep.map_or(true, |k| k.contains(n)) || n + window >= n_max)
        .map(|n| bounds.at(n).iter().map(|&b| b as u64 + 1).product::<u64>())
        .sum();
    let required_mb = entries.saturating_mul(BYTES_PER_ENTRY) / (1 << 20) + 1;
    let budget_mb = memory_budget_mb();
    if required_mb > budget_mb {
        return Err(OracleError::BudgetExceeded {
            required_mb,
            budget_mb,
        });
    }

    let mut slices: Vec<Option<Slice>> = Vec::with_capacity(n_max + 1);
    let mut d_pow = BigInt::one();
    for n in 0..=n_max {
        let mut cur = Slice::new(n, bounds.at(n));
        let strides = cur.strides();
        for g in g_terms.iter().filter(|g| g.b == n) {
            let idx = cur.index_of(&g.a).expect("numerator term lies in the box");
            cur.data[idx] += &g.c * &d_pow;
        }
        for term in &h_terms {
            if term.b > n {
                continue;
            }
            let Some(Some(prev)) = slices.get(n - term.b) else {
                continue;
            };
            scatter(prev, &mut cur, &strides, term);
        }
        slices.push(Some(cur));
        // drop slices that are neither kept nor needed by the window
        if let Some(k) = keep {
            if n >= window {
                let old = n - window;
                if !k.contains(&old) {
                    slices[old] = None;
                }
            }
        }
        d_pow *= &dd;
    }
    if let Some(k) = keep {
        for (n, s) in slices.iter_mut().enumerate() {
            if !k.contains(&n) {
                *s = None;
            }
        }
    }
    Ok(CoefficientTensor {
        d,
        n_max,
        scale: (ee, dd),
        slices,
    })
}

/// `cur[s + a] -= c · prev[s]` over the box of `prev`.
fn scatter(prev: &Slice, cur: &mut Slice, strides: &[usize], term: &Term) {
    let d = prev.bounds.len();
    if d == 0 {
        let v = &term.c * &prev.data[0];
        cur.data[0] -= v;
        return;
    }
    // rows of prev that land inside cur
    let mut lim = Vec::with_capacity(d);
    for k in 0..d {
        if term.a[k] > cur.bounds[k] {
            return;
        }
        lim.push(prev.bounds[k].min(cur.bounds[k] - term.a[k]));
    }
    let offset: usize = term.a.iter().zip(strides).map(|(a, s)| a * s).sum();
    let pst = prev.strides();
    let mut s = vec![0usize; d];
    loop {
        let pi: usize = s.iter().zip(&pst).map(|(a, b)| a * b).sum();
        let ci: usize = s.iter().zip(strides).map(|(a, b)| a * b).sum::<usize>() + offset;
        // innermost run
        let run = lim[d - 1] + 1;
        for r in 0..run {
            let v = &prev.data[pi + r];
            if !v.is_zero() {
                cur.data[ci + r] -= &term.c * v;
            }
        }
        // advance the outer coordinates
        let mut k = d - 1;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            s[k] += 1;
            if s[k] <= lim[k] {
                break;
            }
            s[k] = 0;
        }
    }
}

impl CoefficientTensor {
    pub fn slice(&self, n: usize) -> Option<&Slice> {
        self.slices.get(n).and_then(|s| s.as_ref())
    }

    /// Exact coefficient `f_{s,n}`.
    pub fn coefficient(&self, s: &[usize], n: usize) -> Option<BigRational> {
        let sl = self.slice(n)?;
        Some(BigRational::new(sl.get(s), self.denominator(n)))
    }

    /// `E·Dⁿ`.
    pub fn denominator(&self, n: usize) -> BigInt {
        &self.scale.0 * num_traits::pow(self.scale.1.clone(), n)
    }

    pub fn is_integral(&self) -> bool {
        self.scale.0.is_one() && self.scale.1.is_one()
    }

    /// `Σ_s f_{s,n}`.
    pub fn slice_total(&self, n: usize) -> Option<BigRational> {
        let sl = self.slice(n)?;
        let sum: BigInt = sl.data.iter().sum();
        Some(BigRational::new(sum, self.denominator(n)))
    }

    /// Sums slice `n` over every variable except `k`.
    pub fn marginal(&self, n: usize, k: usize) -> Option<Vec<BigRational>> {
        let sl = self.slice(n)?;
        let mut out = vec![BigInt::zero(); sl.bounds[k] + 1];
        for (i, v) in sl.data.iter().enumerate() {
            out[sl.point_of(i)[k]] += v;
        }
        let den = self.denominator(n);
        Some(out.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
    }
}

/// Peak, mean and covariance of the normalized slice distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceStats {
    pub n: usize,
    /// Lexicographically smallest maximizer.
    pub peak: Vec<usize>,
    /// Number of points attaining the maximum.
    pub peak_ties: usize,
    pub peak_value: BigRational,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

/// Converts `x / 2^shift` to `f64`.
fn shifted_f64(x: &BigInt, shift: u64) -> f64 {
    let v = if shift == 0 { x.clone() } else { x >> shift };
    v.to_f64().unwrap_or(0.0)
}

pub fn empirical_stats(t: &CoefficientTensor, n: usize) -> Result<SliceStats, OracleError> {
    let sl = t.slice(n).ok_or(OracleError::EmptySlice(n))?;
    let total: BigInt = sl.data.iter().sum();
    if !total.is_positive() {
        return Err(OracleError::EmptySlice(n));
    }
    let mut best = 0usize;
    let mut ties = 0usize;
    for (i, v) in sl.data.iter().enumerate() {
        match v.cmp(&sl.data[best]) {
            std::cmp::Ordering::Greater => {
                best = i;
                ties = 1;
            }
            std::cmp::Ordering::Equal => ties += 1,
            std::cmp::Ordering::Less => {}
        }
    }
    let shift = total.bits().saturating_sub(60);
    let tf = shifted_f64(&total, shift);
    let d = t.d;
    let mut mean = vec![0.0; d];
    let mut second = vec![vec![0.0; d]; d];
    for (i, v) in sl.data.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let w = shifted_f64(v, shift) / tf;
        let p = sl.point_of(i);
        for a in 0..d {
            mean[a] += w * p[a] as f64;
            for b in 0..d {
                second[a][b] += w * (p[a] * p[b]) as f64;
            }
        }
    }
    let covariance = (0..d)
        .map(|a| (0..d).map(|b| second[a][b] - mean[a] * mean[b]).collect())
        .collect();
    Ok(SliceStats {
        n,
        peak: sl.point_of(best),
        peak_ties: ties,
        peak_value: BigRational::new(sl.data[best].clone(), t.denominator(n)),
        mean,
        covariance,
    })
}

/// Value of the sup-norm discrepancy together with where it is attained.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub n: usize,
    pub value: f64,
    pub argmax: Vec<usize>,
    /// Estimated floating-point error of `value`.
    pub rounding_bound: f64,
}

/// `ln(ρⁿ f_{s,n})` for every point of the slice (`None` for zeros).
fn scaled_logs(t: &CoefficientTensor, sl: &Slice, ln_rho: f64) -> Vec<Option<(f64, f64)>> {
    let n = sl.n as f64;
    let ln_den = numfmt::ln_abs(&BigRational::from_integer(t.denominator(sl.n)));
    sl.data
        .iter()
        .map(|v| {
            if v.is_zero() {
                None
            } else {
                let l = numfmt::ln_abs(&BigRational::from_integer(v.clone())) - ln_den + n * ln_rho;
                Some((l, if v.is_negative() { -1.0 } else { 1.0 }))
            }
        })
        .collect()
}

/// Model exponent `−(s − nm)ᵀ 𝓗⁻¹ (s − nm) / 2n` in floating point.
pub fn model_exponent(m: &[f64], inv: &[Vec<f64>], n: usize, s: &[usize]) -> f64 {
    let nf = n as f64;
    let dev: Vec<f64> = s.iter().zip(m).map(|(&si, mi)| si as f64 - nf * mi).collect();
    let mut q = 0.0;
    for i in 0..dev.len() {
        for j in 0..dev.len() {
            q += dev[i] * inv[i][j] * dev[j];
        }
    }
    -q / (2.0 * nf)
}

/// `E(n) = sup_s n^{d/2} |ρⁿ f_{s,n} − C0 (2πn)^{-d/2} det(𝓗)^{-1/2} v_n(s)|`
/// over the stored box.
pub fn lclt_gap(t: &CoefficientTensor, cert: &LcltCertificate, n: usize) -> Result<Gap, OracleError> {
    let inv = cert.hess_inv_f64().ok_or(OracleError::DegenerateCertificate)?;
    let sl = t.slice(n).ok_or(OracleError::EmptySlice(n))?;
    if n == 0 {
        return Err(OracleError::EmptySlice(0));
    }
    let d = cert.d() as f64;
    let nf = n as f64;
    let m = cert.m_f64();
    let ln_rho = cert.rho.to_f64().ln();
    // n^{d/2} · C0 (2πn)^{-d/2} det^{-1/2} = C0 (2π)^{-d/2} det^{-1/2}
    let amp = cert.amplitude_constant();
    let norm = nf.powf(d / 2.0);
    let logs = scaled_logs(t, sl, ln_rho);
    let mut best = (0.0f64, vec![0usize; cert.d()]);
    let mut max_term = 0.0f64;
    for (i, l) in logs.iter().enumerate() {
        let p = sl.point_of(i);
        let model = amp * model_exponent(&m, &inv, n, &p).exp();
        let actual = match l {
            Some((l, sign)) => sign * (l.exp() * norm),
            None => 0.0,
        };
        let diff = (actual - model).abs();
        max_term = max_term.max(actual.abs()).max(model.abs());
        if diff > best.0 {
            best = (diff, p);
        }
    }
    Ok(Gap {
        n,
        value: best.0,
        argmax: best.1,
        rounding_bound: max_term * (1e-13 + nf * 4.0 * f64::EPSILON * (1.0 + ln_rho.abs())),
    })
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes slice `n` as CSV: `n,s1,…,sd,coeff,normalized[,model]`. With a
/// non-degenerate certificate `normalized = f/A_n` and `model = v_n(s)`;
/// otherwise `normalized = f/max f` and there is no model column.
pub fn emit_plot_data(
    t: &CoefficientTensor,
    cert: Option<&LcltCertificate>,
    n: usize,
    path: &Path,
) -> Result<(), OracleError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_plot_data(t, cert, n, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_plot_data(
    t: &CoefficientTensor,
    cert: Option<&LcltCertificate>,
    n: usize,
    out: &mut impl Write,
) -> Result<(), OracleError> {
    let sl = t.slice(n).ok_or(OracleError::EmptySlice(n))?;
    let model = cert
        .filter(|c| c.hess_inv.is_some() && n > 0)
        .map(|c| (c.m_f64(), c.hess_inv_f64().unwrap(), c.ln_amplitude(n as u64)));
    let mut header = vec!["n".to_string()];
    header.extend((1..=t.d).map(|k| format!("s{k}")));
    header.push("coeff".into());
    header.push("normalized".into());
    if model.is_some() {
        header.push("model".into());
    }
    writeln!(out, "{}", header.join(","))?;
    let den = t.denominator(n);
    let max = sl.data.iter().max().cloned().unwrap_or_else(BigInt::zero);
    let ln_den = numfmt::ln_abs(&BigRational::from_integer(den.clone()));
    let ln_max = if max.is_zero() {
        0.0
    } else {
        numfmt::ln_abs(&BigRational::from_integer(max.clone()))
    };
    for (i, v) in sl.data.iter().enumerate() {
        let p = sl.point_of(i);
        let mut row = vec![n.to_string()];
        row.extend(p.iter().map(|x| x.to_string()));
        row.push(BigRational::new(v.clone(), den.clone()).to_string());
        let ln_v = if v.is_zero() {
            None
        } else {
            Some(numfmt::ln_abs(&BigRational::from_integer(v.clone())))
        };
        let sign = if v.is_negative() { -1.0 } else { 1.0 };
        match &model {
            Some((m, inv, ln_a)) => {
                let normalized = ln_v.map_or(0.0, |l| sign * (l - ln_den - ln_a).exp());
                row.push(fmt17(normalized));
                row.push(fmt17(model_exponent(m, inv, n, &p).exp()));
            }
            None => {
                let normalized = ln_v.map_or(0.0, |l| sign * (l - ln_max).exp());
                row.push(fmt17(normalized));
            }
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfparse::parse_gf;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn geometric_series() {
        let t = expand(&parse_gf("1/(1-t)").unwrap(), 5).unwrap();
        for n in 0..=5 {
            assert_eq!(t.slice_total(n), Some(int(1)));
        }
    }

    #[test]
    fn restricted_permutations_slice() {
        let t = expand(&parse_gf("1/(1 - z1*t - z2*t^2)").unwrap(), 4).unwrap();
        assert_eq!(t.coefficient(&[4, 0], 4), Some(int(1)));
        assert_eq!(t.coefficient(&[2, 1], 4), Some(int(3)));
        assert_eq!(t.coefficient(&[0, 2], 4), Some(int(1)));
        assert_eq!(t.slice_total(4), Some(int(5)));
    }

    #[test]
    fn rational_coefficients() {
        // 1/(1 - t/2) = Σ 2^-n t^n
        let t = expand(&parse_gf("1/(1 - 1/2*t)").unwrap(), 6).unwrap();
        assert_eq!(t.slice_total(6), Some(BigRational::new(1.into(), 64.into())));
        assert!(!t.is_integral());
    }

    #[test]
    fn binomial_stats() {
        let t = expand(&parse_gf("1/(1 - (z1 + 1)*t)").unwrap(), 100).unwrap();
        let st = empirical_stats(&t, 100).unwrap();
        assert_eq!(st.peak, vec![50]);
        assert_eq!(st.peak_ties, 1);
        assert!((st.mean[0] - 50.0).abs() < 1e-9);
        assert!((st.covariance[0][0] - 25.0).abs() < 1e-9);
    }

    #[test]
    fn keeping_only_some_slices() {
        let gf = parse_gf("1/(1 - z1*t - z2*t^2)").unwrap();
        let keep: BTreeSet<usize> = [10, 20].into_iter().collect();
        let part = expand_keeping(&gf, 20, Some(&keep)).unwrap();
        let full = expand(&gf, 20).unwrap();
        assert!(part.slice(15).is_none());
        assert_eq!(part.slice(20), full.slice(20));
        assert_eq!(part.slice(10), full.slice(10));
    }

    #[test]
    fn budget_and_unbounded_errors() {
        assert!(matches!(
            expand(&parse_gf("1/(1 - z1 - t)").unwrap(), 3),
            Err(OracleError::UnboundedSlice)
        ));
    }

    #[test]
    fn csv_layout() {
        let t = expand(&parse_gf("1/(1 - z1*t - z2*t^2)").unwrap(), 4).unwrap();
        let mut buf = Vec::new();
        write_plot_data(&t, None, 4, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,s1,s2,coeff,normalized");
        assert_eq!(lines[1], "4,0,0,0,0.0000000000000000e0");
        assert!(lines.contains(&"4,2,1,3,1.0000000000000000e0"));
    }
}
