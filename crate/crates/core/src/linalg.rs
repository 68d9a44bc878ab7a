//! Small dense symmetric-matrix toolkit: Cholesky factorization, inversion,
//! determinants, Jacobi eigenvalues and the index surgery used by the
//! conditional-normal recursions.

use crate::error::{MomentError, Result};
use crate::real::Real;

/// Relative tolerance for accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds from row-major data of length `n * n`.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(MomentError::DimensionMismatch { expected: n * n, got: data.len() });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MomentError::DimensionMismatch { expected: n, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).take(self.n).collect()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| x * factor).collect() }
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                acc = acc + v[i] * self[(i, j)] * v[j];
            }
        }
        acc
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self[(i, j)] == T::zero()))
    }

    pub fn check_symmetric(&self) -> Result<()> {
        let scale = self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        let tol = T::lit(SYMMETRY_TOL) * scale.max(T::min_positive_value());
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let diff = (self[(i, j)] - self[(j, i)]).abs();
                if !(diff <= tol) {
                    return Err(MomentError::NotSymmetric { row: i, col: j, diff: diff.as_f64() });
                }
            }
        }
        Ok(())
    }

    /// Lower Cholesky factor; fails with the smallest eigenvalue when the
    /// matrix is not positive definite.
    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(self.not_positive_definite());
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    fn not_positive_definite(&self) -> MomentError {
        let eigenvalue = self.symmetric_eigenvalues().into_iter().fold(T::infinity(), |m, x| m.min(x)).as_f64();
        MomentError::NotPositiveDefinite { eigenvalue }
    }

    /// Symmetry check plus Cholesky.
    pub fn validate_spd(&self) -> Result<Cholesky<T>> {
        self.check_symmetric()?;
        self.cholesky()
    }

    /// Eigenvalues of the symmetric part by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut a = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let s = (a[(i, j)] + a[(j, i)]) * T::lit(0.5);
                a[(i, j)] = s;
                a[(j, i)] = s;
            }
        }
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off <= T::epsilon() * T::epsilon() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// The matrix with row and column `j` removed.
    pub fn without(&self, j: usize) -> Self {
        let idx: Vec<usize> = (0..self.n).filter(|&i| i != j).collect();
        let mut out = Self::zeros(self.n - 1);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &k) in idx.iter().enumerate() {
                out[(r, c)] = self[(i, k)];
            }
        }
        out
    }

    /// Column `j` with entry `j` removed.
    pub fn column_without(&self, j: usize) -> Vec<T> {
        (0..self.n).filter(|&i| i != j).map(|i| self[(i, j)]).collect()
    }

    /// Schur complement of the `(j, j)` entry:
    /// `M_(j)(j) - M_(j),j M_j,(j) / M_jj`.
    pub fn schur_complement(&self, j: usize) -> Self {
        let mut out = self.without(j);
        let col = self.column_without(j);
        let pivot = self[(j, j)];
        for r in 0..col.len() {
            for c in 0..col.len() {
                out[(r, c)] = out[(r, c)] - col[r] * col[c] / pivot;
            }
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// `M = L Lᵀ` with `L` lower triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky<T> {
    l: SquareMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(&self) -> &SquareMatrix<T> {
        &self.l
    }

    pub fn log_det(&self) -> T {
        (0..self.l.n).map(|i| self.l[(i, i)].ln()).sum::<T>() * T::lit(2.0)
    }

    /// Solves `L x = b`.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.l.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for (k, &xk) in x.iter().enumerate().take(i) {
                s = s - self.l[(i, k)] * xk;
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// Solves `Lᵀ x = b`.
    pub fn solve_upper(&self, b: &[T]) -> Vec<T> {
        let n = self.l.n;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for (k, &xk) in x.iter().enumerate().skip(i + 1) {
                s = s - self.l[(k, i)] * xk;
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// Inverse of the factored matrix, symmetrized.
    pub fn inverse(&self) -> SquareMatrix<T> {
        let n = self.l.n;
        let mut inv = SquareMatrix::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let s = (inv[(i, j)] + inv[(j, i)]) * T::lit(0.5);
                inv[(i, j)] = s;
                inv[(j, i)] = s;
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd3() -> SquareMatrix<f64> {
        SquareMatrix::from_rows(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, -0.2], vec![0.5, -0.2, 2.0]]).unwrap()
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = spd3();
        let inv = m.cholesky().unwrap().inverse();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[(i, k)] * inv[(k, j)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn log_det_matches_eigenvalues() {
        let m = spd3();
        let ld = m.cholesky().unwrap().log_det();
        let ev: f64 = m.symmetric_eigenvalues().iter().map(|x| x.ln()).sum();
        assert!((ld - ev).abs() < 1e-12);
    }

    #[test]
    fn indefinite_matrix_reports_negative_eigenvalue() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        match m.validate_spd() {
            Err(MomentError::NotPositiveDefinite { eigenvalue }) => assert!((eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 0.3], vec![0.2, 1.0]]).unwrap();
        assert!(matches!(m.validate_spd(), Err(MomentError::NotSymmetric { .. })));
    }

    #[test]
    fn schur_complement_inverts_to_precision_block() {
        // inverse of a covariance Schur complement is the precision sub-block
        let cov = spd3();
        let prec = cov.cholesky().unwrap().inverse();
        let s = cov.schur_complement(1);
        let s_inv = s.cholesky().unwrap().inverse();
        let block = prec.without(1);
        for i in 0..2 {
            for j in 0..2 {
                assert!((s_inv[(i, j)] - block[(i, j)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(SquareMatrix::<f64>::from_rows(&[vec![1.0, 0.0], vec![0.0]]).is_err());
    }
}
