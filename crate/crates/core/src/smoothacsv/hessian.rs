//! Critical direction and phase Hessian at the point `(1, …, 1, ρ)`.

use crate::gfparse::{RationalGF, T};
use crate::polycore::{Matrix, Scalar, UPoly};

/// `H`, `G` and the partial derivatives of `H` that enter the critical
/// point equations and the phase Hessian, all specialized to `z = 1`.
#[derive(Clone, Debug)]
pub struct CriticalData {
    pub p: UPoly,
    pub ht: UPoly,
    pub htt: UPoly,
    pub hz: Vec<UPoly>,
    pub hzt: Vec<UPoly>,
    pub hzz: Vec<Vec<UPoly>>,
    pub g1: UPoly,
}

impl CriticalData {
    pub fn new(gf: &RationalGF) -> Self {
        let h = gf.h();
        let diff = |p: &crate::polycore::MultiPoly, v: &str| {
            p.partial_derivative(v).expect("variable is in the roster")
        };
        let ht_m = diff(h, T);
        let hz_m: Vec<_> = gf.zvars().iter().map(|z| diff(h, z)).collect();
        CriticalData {
            p: gf.p(),
            ht: gf.at_ones(&ht_m),
            htt: gf.at_ones(&diff(&ht_m, T)),
            hz: hz_m.iter().map(|p| gf.at_ones(p)).collect(),
            hzt: hz_m.iter().map(|p| gf.at_ones(&diff(p, T))).collect(),
            hzz: hz_m
                .iter()
                .map(|p| gf.zvars().iter().map(|z| gf.at_ones(&diff(p, z))).collect())
                .collect(),
            g1: gf.at_ones(gf.g()),
        }
    }

    pub fn d(&self) -> usize {
        self.hz.len()
    }
}

/// Mean direction and phase Hessian evaluated at `t`, or `None` when
/// `H_t(1, t)` is not certainly nonzero.
pub fn direction_and_hessian<S: Scalar>(cd: &CriticalData, t: &S) -> Option<(Vec<S>, Matrix<S>)> {
    let ev = |p: &UPoly| S::eval_upoly(p, t);
    let ht = ev(&cd.ht);
    if !ht.is_certainly_nonzero() {
        return None;
    }
    let tht = t.times(&ht);
    let d = cd.d();
    let m: Vec<S> = cd
        .hz
        .iter()
        .map(|p| ev(p).checked_div(&tht))
        .collect::<Option<_>>()?;
    let u_t: Vec<S> = cd
        .hzt
        .iter()
        .map(|p| ev(p).checked_div(&ht))
        .collect::<Option<_>>()?;
    let u_tt = t.times(&ev(&cd.htt)).checked_div(&ht)?;
    let mut rows = vec![vec![S::zero(); d]; d];
    for i in 0..d {
        for j in i..d {
            let u_ij = ev(&cd.hzz[i][j]).checked_div(&tht)?;
            let ri = &m[i];
            let rj = &m[j];
            let rirj = ri.times(rj);
            let v = if i == j {
                ri.plus(&rirj)
                    .plus(&u_ij)
                    .minus(&S::from_int(2).times(ri).times(&u_t[i]))
                    .plus(&rirj.times(&u_tt))
            } else {
                rirj.plus(&u_ij)
                    .minus(&rj.times(&u_t[i]))
                    .minus(&ri.times(&u_t[j]))
                    .plus(&rirj.times(&u_tt))
            };
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    Some((m, Matrix::from_rows(rows)))
}

/// The leading constant `C0 = −G(1, t) / (t H_t(1, t))`.
pub fn leading_constant<S: Scalar>(cd: &CriticalData, t: &S) -> Option<S> {
    let tht = t.times(&S::eval_upoly(&cd.ht, t));
    S::eval_upoly(&cd.g1, t).negate().checked_div(&tht)
}

/// Residuals `H_{z_k}(1, t) − m_k t H_t(1, t)` of the critical point
/// equations, followed by `P(t)`.
pub fn criticality_residuals<S: Scalar>(cd: &CriticalData, t: &S, m: &[S]) -> Vec<S> {
    let tht = t.times(&S::eval_upoly(&cd.ht, t));
    let mut out: Vec<S> = cd
        .hz
        .iter()
        .zip(m)
        .map(|(p, mk)| S::eval_upoly(p, t).minus(&mk.times(&tht)))
        .collect();
    out.push(S::eval_upoly(&cd.p, t));
    out
}
