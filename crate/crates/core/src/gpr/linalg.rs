//! Dense row-major matrices and a Cholesky factorization.
//!
//! Every linear solve in the regression goes through [`Cholesky`]; there is no
//! explicit inverse anywhere in this crate.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Returns `None` if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let data = rows.iter().flatten().copied().collect();
        Some(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Single-column matrix.
    pub fn column(values: &[T]) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Copy with row `skip` removed.
    pub fn without_row(&self, skip: usize) -> Self {
        let data = self
            .rows()
            .enumerate()
            .filter(|&(r, _)| r != skip)
            .flat_map(|(_, row)| row.iter().copied())
            .collect();
        Matrix {
            rows: self.rows - 1,
            cols: self.cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    lower: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factorizes the symmetric matrix `a`, reading only its lower triangle.
    ///
    /// A pivot at or below `relative_tolerance * max|a_ii|` counts as a failure,
    /// so numerically rank-deficient matrices are rejected rather than
    /// producing an ill-conditioned factor.
    pub fn new(a: &Matrix<T>, relative_tolerance: T) -> Option<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return None;
        }
        let scale = (0..n).map(|i| a[(i, i)].abs()).fold(T::zero(), T::max);
        let floor = relative_tolerance * scale;
        let mut lower = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag -= lower[(j, k)] * lower[(j, k)];
            }
            if !diag.is_finite() || diag <= floor || diag <= T::zero() {
                return None;
            }
            let pivot = diag.sqrt();
            lower[(j, j)] = pivot;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= lower[(i, k)] * lower[(j, k)];
                }
                lower[(i, j)] = s / pivot;
            }
        }
        Some(Cholesky { lower })
    }

    /// Default tolerance for covariance matrices: a few ulps per row.
    pub fn covariance_tolerance(n: usize) -> T {
        T::epsilon() * T::from_count(n.max(1))
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// Solves `L y = b` by forward substitution.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length");
        let mut y = b.to_vec();
        for i in 0..n {
            let row = self.lower.row(i);
            let mut s = y[i];
            for k in 0..i {
                s -= row[k] * y[k];
            }
            y[i] = s / row[i];
        }
        y
    }

    /// Solves `Lᵀ x = y` by back substitution.
    pub fn solve_upper(&self, y: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(y.len(), n, "right-hand side length");
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.lower[(k, i)] * x[k];
            }
            x[i] = s / self.lower[(i, i)];
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// Applies `L⁻¹` to every column of `b`.
    pub fn solve_lower_columns(&self, b: &Matrix<T>) -> Matrix<T> {
        let cols: Vec<Vec<T>> = (0..b.ncols())
            .map(|c| {
                let col: Vec<T> = (0..b.nrows()).map(|r| b[(r, c)]).collect();
                self.solve_lower(&col)
            })
            .collect();
        Matrix::from_fn(b.nrows(), b.ncols(), |r, c| cols[c][r])
    }

    /// Factor of `s·A` for `s > 0`.
    pub fn scaled(&self, s: T) -> Self {
        let r = s.sqrt();
        let n = self.dim();
        Cholesky {
            lower: Matrix::from_fn(n, n, |i, j| self.lower[(i, j)] * r),
        }
    }

    /// `ln det A = 2 Σ ln L_ii`.
    pub fn log_det(&self) -> T {
        let two = T::one() + T::one();
        two * (0..self.dim()).map(|i| self.lower[(i, i)].ln()).sum::<T>()
    }

    /// Recomputes `L Lᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            let upto = i.min(j);
            (0..=upto)
                .map(|k| self.lower[(i, k)] * self.lower[(j, k)])
                .sum()
        })
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
