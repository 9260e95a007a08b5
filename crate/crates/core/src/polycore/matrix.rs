//! Small dense matrices over a [`Scalar`]: products, fraction-free
//! determinants and Gauss-Jordan inverses.

use std::fmt;

use super::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is singular")]
    Singular,
    #[error("sign of a pivot could not be decided at the available precision")]
    Indeterminate,
    #[error("matrix is not square")]
    NotSquare,
}

impl MatrixError {
    pub fn code(&self) -> &'static str {
        match self {
            MatrixError::Singular => "SINGULAR",
            MatrixError::Indeterminate => "INDETERMINATE",
            MatrixError::NotSquare => "NOT_SQUARE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == n), "ragged matrix");
        Matrix { rows }
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        Matrix {
            rows: (0..nrows)
                .map(|i| (0..ncols).map(|j| f(i, j)).collect())
                .collect(),
        }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self::from_fn(n, m, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map(|r| r.len()).unwrap_or(0)
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols(), self.nrows(), |i, j| self.rows[j][i].clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.ncols(), other.nrows(), "shape mismatch in product");
        Self::from_fn(self.nrows(), other.ncols(), |i, j| {
            let mut acc = S::zero();
            for k in 0..self.ncols() {
                acc = acc.plus(&self.rows[i][k].times(&other.rows[k][j]));
            }
            acc
        })
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        Self::from_fn(self.nrows(), self.ncols(), |i, j| {
            self.rows[i][j].minus(&other.rows[i][j])
        })
    }

    /// Quadratic form `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[S]) -> S {
        let mut acc = S::zero();
        for (i, vi) in v.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                acc = acc.plus(&vi.times(&self.rows[i][j]).times(vj));
            }
        }
        acc
    }

    /// Determinant by Bareiss fraction-free elimination. Returns an exact
    /// zero for singular exact matrices.
    pub fn determinant(&self) -> Result<S, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare);
        }
        let n = self.nrows();
        if n == 0 {
            return Ok(S::one());
        }
        let mut a = self.rows.clone();
        let mut sign_flip = false;
        let mut prev = S::one();
        for k in 0..n {
            match choose_pivot(&a, k, k)? {
                None => return Ok(S::zero()),
                Some(p) => {
                    if p != k {
                        a.swap(p, k);
                        sign_flip = !sign_flip;
                    }
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[k][k].times(&a[i][j]).minus(&a[i][k].times(&a[k][j]));
                    a[i][j] = num.checked_div(&prev).ok_or(MatrixError::Indeterminate)?;
                }
                a[i][k] = S::zero();
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if sign_flip { det.negate() } else { det })
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix<S>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare);
        }
        let n = self.nrows();
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for k in 0..n {
            let p = choose_pivot(&a, k, k)?.ok_or(MatrixError::Singular)?;
            a.swap(p, k);
            inv.swap(p, k);
            let piv = a[k][k].clone();
            for j in 0..n {
                a[k][j] = a[k][j].checked_div(&piv).ok_or(MatrixError::Indeterminate)?;
                inv[k][j] = inv[k][j].checked_div(&piv).ok_or(MatrixError::Indeterminate)?;
            }
            for i in 0..n {
                if i == k || a[i][k].is_certainly_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    a[i][j] = a[i][j].minus(&f.times(&a[k][j]));
                    inv[i][j] = inv[i][j].minus(&f.times(&inv[k][j]));
                }
            }
        }
        Ok(Matrix { rows: inv })
    }

    /// Determinant and inverse; `Singular` when the determinant is exactly
    /// zero, `Indeterminate` when its sign cannot be certified.
    pub fn det_and_inverse(&self) -> Result<(S, Matrix<S>), MatrixError> {
        let det = self.determinant()?;
        if det.is_certainly_zero() {
            return Err(MatrixError::Singular);
        }
        if !det.is_certainly_nonzero() {
            return Err(MatrixError::Indeterminate);
        }
        let inv = self.inverse()?;
        Ok((det, inv))
    }

    /// Leading principal minors `M[..k, ..k]` for `k = 1..=n`.
    pub fn leading_principal_minors(&self) -> Result<Vec<S>, MatrixError> {
        (1..=self.nrows())
            .map(|k| Self::from_fn(k, k, |i, j| self.rows[i][j].clone()).determinant())
            .collect()
    }
}

/// First row at or below `start` whose entry in `col` is certainly nonzero.
/// `Ok(None)` when every candidate is certainly zero.
fn choose_pivot<S: Scalar>(
    a: &[Vec<S>],
    start: usize,
    col: usize,
) -> Result<Option<usize>, MatrixError> {
    let mut uncertain = false;
    for (i, row) in a.iter().enumerate().skip(start) {
        if row[col].is_certainly_nonzero() {
            return Ok(Some(i));
        }
        if !row[col].is_certainly_zero() {
            uncertain = true;
        }
    }
    if uncertain {
        Err(MatrixError::Indeterminate)
    } else {
        Ok(None)
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::interval::IntervalValue;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> IntervalValue {
        IntervalValue::point(BigRational::new(n.into(), d.into()))
    }

    fn mat(rows: &[&[(i64, i64)]]) -> Matrix<IntervalValue> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| q(n, d)).collect())
                .collect(),
        )
    }

    #[test]
    fn one_by_one() {
        let m = mat(&[&[(5, 16)]]);
        let (det, inv) = m.det_and_inverse().unwrap();
        assert_eq!(det, q(5, 16));
        assert_eq!(inv, mat(&[&[(16, 5)]]));
    }

    #[test]
    fn identity_is_its_own_inverse() {
        let m = Matrix::<IntervalValue>::identity(3);
        let (det, inv) = m.det_and_inverse().unwrap();
        assert_eq!(det, q(1, 1));
        assert_eq!(inv, m);
    }

    #[test]
    fn rank_one_is_singular() {
        let m = mat(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert_eq!(m.det_and_inverse().unwrap_err(), MatrixError::Singular);
        assert_eq!(m.determinant().unwrap(), q(0, 1));
    }

    #[test]
    fn pivoting_and_sign() {
        let m = mat(&[
            &[(0, 1), (1, 1), (2, 1)],
            &[(1, 1), (0, 1), (3, 1)],
            &[(4, 1), (-3, 1), (8, 1)],
        ]);
        let (det, inv) = m.det_and_inverse().unwrap();
        assert_eq!(det, q(-2, 1));
        assert_eq!(m.mul(&inv), Matrix::identity(3));
    }

    #[test]
    fn straddling_determinant_is_indeterminate() {
        let m = Matrix::from_rows(vec![vec![IntervalValue::new(
            BigRational::new((-1).into(), 10.into()),
            BigRational::new(1.into(), 10.into()),
        )]]);
        assert_eq!(m.det_and_inverse().unwrap_err(), MatrixError::Indeterminate);
    }
}
