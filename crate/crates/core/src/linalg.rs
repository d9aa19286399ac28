//! Small dense linear algebra: just what the solvers and the conditioning check need.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: alloc::vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn mul_transpose_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = alloc::vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                axpy(yr, self.row(r), &mut out);
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a != 0.0 {
                    axpy(a, other.row(k), out.row_mut(r));
                }
            }
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// y += a * x
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| f64::max(m, libm::fabs(*v)))
}

pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// All `min(rows, cols)` singular values in decreasing order, by one-sided Jacobi
/// rotations on the columns of the taller orientation.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Empty("matrix"));
    }
    // columns of `cols` become the vectors we orthogonalize
    let tall = if a.rows() >= a.cols() { a.transpose() } else { a.clone() };
    let k = tall.rows();
    let len = tall.cols();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|i| tall.row(i).to_vec()).collect();

    const MAX_SWEEPS: usize = 80;
    let tol = 1e-15;
    // vectors below this squared norm are numerically zero
    let negligible = {
        let frob2: f64 = cols.iter().map(|c| dot(c, c)).sum();
        f64::EPSILON * f64::EPSILON * frob2
    };
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if alpha <= negligible || beta <= negligible || libm::fabs(gamma) <= tol * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(j);
                let (ci, cj) = (&mut lo[i], &mut hi[0]);
                for r in 0..len {
                    let x = ci[r];
                    let y = cj[r];
                    ci[r] = c * x - s * y;
                    cj[r] = s * x + c * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure("one-sided Jacobi SVD did not converge".into()));
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok(sv)
}

/// The smallest of the `min(rows, cols)` singular values; invariant under transposition.
pub fn smallest_singular_value(a: &DenseMatrix) -> Result<f64> {
    singular_values(a).map(|sv| sv.last().copied().unwrap_or(0.0))
}

/// Lower-triangular Cholesky factor `L` with `A = L L^T`.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.cols() });
    }
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) {
            return Err(Error::NumericalFailure("matrix is not positive definite".into()));
        }
        let ljj = libm::sqrt(diag);
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// Solves `L L^T x = b` given the Cholesky factor.
pub fn cholesky_solve(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Inverse of a square matrix by Gauss-Jordan elimination with partial pivoting.
pub fn invert(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.cols() });
    }
    let mut m = a.clone();
    let mut inv = DenseMatrix::identity(n);
    let scale = norm_inf(a.as_slice()).max(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| libm::fabs(m[(x, col)]).partial_cmp(&libm::fabs(m[(y, col)])).unwrap())
            .unwrap();
        let pv = m[(pivot, col)];
        if libm::fabs(pv) <= 1e-13 * scale {
            return Err(Error::NumericalFailure("singular matrix".into()));
        }
        if pivot != col {
            for c in 0..n {
                let t = m[(col, c)];
                m[(col, c)] = m[(pivot, c)];
                m[(pivot, c)] = t;
                let t = inv[(col, c)];
                inv[(col, c)] = inv[(pivot, c)];
                inv[(pivot, c)] = t;
            }
        }
        for c in 0..n {
            m[(col, c)] /= pv;
            inv[(col, c)] /= pv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[(r, col)];
            if f == 0.0 {
                continue;
            }
            for c in 0..n {
                m[(r, c)] -= f * m[(col, c)];
                inv[(r, c)] -= f * inv[(col, c)];
            }
        }
    }
    Ok(inv)
}

/// Solves the symmetric positive semidefinite system `(A + mu I) x = b` where `A = G G^T`
/// for the row subset `G` passed as dense rows. Used by the Newton steps.
pub fn solve_regularized_normal(gram: &DenseMatrix, b: &[f64], mu: f64) -> Result<Vec<f64>> {
    let n = gram.rows();
    let mut reg = gram.clone();
    for i in 0..n {
        reg[(i, i)] += mu;
    }
    let l = cholesky(&reg)?;
    Ok(cholesky_solve(&l, b))
}
