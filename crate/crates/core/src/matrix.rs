//! Dense row-major matrices over an exact scalar type.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::scalar::{FieldScalar, IntScalar, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::EntryCount { rows, cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(MatrixError::Ragged { row: i, got: row.len(), expected: ncols });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: nrows, cols: ncols, data })
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has wrong length");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    let cell = &mut out[(i, j)];
                    *cell = cell.clone() + prod;
                }
            }
        }
        Ok(out)
    }

    /// Matrix product; panics on a shape mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("matrix shape mismatch")
    }

    /// `Pᵀ · self · P`.
    pub fn congruent(&self, p: &Self) -> Self {
        p.transpose().mul(&self.mul(p))
    }

    pub fn scale(&self, c: &T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x.clone()).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && *self == self.transpose().neg()
    }

    /// Block-diagonal composition `self ⊕ other`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let cols: Vec<Vec<T>> = (0..self.cols)
            .map(|j| self.column(j))
            .chain((0..other.cols).map(|j| other.column(j)))
            .collect();
        Self::from_columns(self.rows, &cols)
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<T>> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    /// Simultaneous row and column permutation: `out[i][j] = self[perm[i]][perm[j]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self[(perm[i], perm[j])].clone();
            }
        }
        m
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }
}

impl<T: IntScalar> Matrix<T> {
    /// Exact determinant by fraction-free (Bareiss) elimination. The empty
    /// matrix has determinant 1.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return T::zero();
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            let pivot = a[k * n + k].clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = pivot.clone() * a[i * n + j].clone()
                        - a[i * n + k].clone() * a[k * n + j].clone();
                    a[i * n + j] = v / prev.clone();
                }
                a[i * n + k] = T::zero();
            }
            prev = pivot;
        }
        if n == 0 {
            T::one()
        } else {
            sign * a[n * n - 1].clone()
        }
    }

    pub fn to_big(&self) -> Matrix<BigInt> {
        self.map(|x| x.to_big())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(T::zero)
    }

    pub fn to_rational(&self) -> Matrix<BigRational> {
        self.map(|x| BigRational::from_integer(x.to_big()))
    }

    /// Exact inverse of a unimodular matrix; `None` when `|det| != 1`.
    pub fn unimodular_inverse(&self) -> Option<Self> {
        if !self.is_square() || !self.det().abs().is_one() {
            return None;
        }
        let inv = self.to_rational().inverse()?;
        let mut data = Vec::with_capacity(inv.data.len());
        for q in inv.data {
            if !q.is_integer() {
                return None;
            }
            data.push(T::from_big(&q.to_integer())?);
        }
        Some(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// Column-style Hermite reduction: a unimodular `U` with `self·U` in
    /// column echelon form, and the number of nonzero (pivot) columns.
    pub fn column_echelon(&self) -> (Self, usize) {
        let (r, c) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = Matrix::identity(c);
        let mut piv = 0;
        for row in 0..r {
            if piv == c {
                break;
            }
            for j in piv + 1..c {
                if a[(row, j)].is_zero() {
                    continue;
                }
                let eg = a[(row, piv)].extended_gcd(&a[(row, j)]);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let p = a[(row, piv)].clone() / g.clone();
                let q = a[(row, j)].clone() / g;
                // [col_piv, col_j] <- [x·col_piv + y·col_j, -q·col_piv + p·col_j], determinant 1.
                for m in [&mut a, &mut u] {
                    for i in 0..m.rows {
                        let (cp, cj) = (m[(i, piv)].clone(), m[(i, j)].clone());
                        m[(i, piv)] = x.clone() * cp.clone() + y.clone() * cj.clone();
                        m[(i, j)] = p.clone() * cj - q.clone() * cp;
                    }
                }
            }
            if !a[(row, piv)].is_zero() {
                piv += 1;
            }
        }
        (u, piv)
    }

    /// Columns spanning the integer kernel `{x : self·x = 0}`. They extend to
    /// a unimodular basis of `Zⁿ`.
    pub fn integer_kernel(&self) -> Self {
        let (u, piv) = self.column_echelon();
        let idx: Vec<usize> = (piv..self.cols).collect();
        u.select_columns(&idx)
    }
}

impl Matrix<BigInt> {
    /// Narrowing to a smaller integer type when every entry fits.
    pub fn narrow<T: IntScalar>(&self) -> Option<Matrix<T>> {
        let data: Option<Vec<T>> = self.data.iter().map(T::from_big).collect();
        Some(Matrix { rows: self.rows, cols: self.cols, data: data? })
    }
}

impl<T: FieldScalar> Matrix<T> {
    /// Rank by Gaussian elimination over the field.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for c in 0..a.cols {
            let Some(p) = (rank..a.rows).find(|&r| !a[(r, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(p, rank);
            let pivot = a[(rank, c)].clone();
            for r in 0..a.rows {
                if r != rank && !a[(r, c)].is_zero() {
                    let f = a[(r, c)].clone() / pivot.clone();
                    for j in c..a.cols {
                        let v = a[(r, j)].clone() - f.clone() * a[(rank, j)].clone();
                        a[(r, j)] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero())?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let pivot = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = a[(c, j)].clone() / pivot.clone();
                inv[(c, j)] = inv[(c, j)].clone() / pivot.clone();
            }
            for r in 0..n {
                if r != c && !a[(r, c)].is_zero() {
                    let f = a[(r, c)].clone();
                    for j in 0..n {
                        a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                        inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(c, j)].clone();
                    }
                }
            }
        }
        Some(inv)
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    /// Renders rows of space-separated entries (no header line).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> =
                self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> =
                self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Convenience constructor for tests and fixtures.
pub fn int_matrix(rows: &[&[i64]]) -> Matrix<BigInt> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
        .expect("ragged literal")
}
