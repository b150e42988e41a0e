//! Deterministic exact linear algebra over the rationals and Gaussian
//! rationals: rank, canonical nullspace bases, linear solves, realification.
//!
//! Everything reduces to one reduced-row-echelon routine with leftmost
//! pivots. Dimension counts are the primary outputs of this crate, so the
//! arithmetic is exact and the bases are canonical: identical inputs yield
//! bit-identical outputs.

use crate::scalar::{cconj, CRat, Rat};
use std::ops::Neg;

/// Scalars the elimination core works over. Satisfied by `Rat` and `CRat`.
pub trait FieldScalar: Clone + PartialEq + num_traits::Num + Neg<Output = Self> {}
impl<T> FieldScalar for T where T: Clone + PartialEq + num_traits::Num + Neg<Output = T> {}

/// Dense row-major matrix over an exact field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

pub type RatMatrix = Matrix<Rat>;
pub type GaussMatrix = Matrix<CRat>;

impl<T: FieldScalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Matrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            entries.extend(r);
        }
        Matrix {
            rows: n_rows,
            cols: n_cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.at(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    *out.at_mut(i, j) = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length must match cols");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    let a = self.at(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc = acc + a.clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// In-place reduction to reduced row echelon form with leftmost pivots.
    /// Returns the pivot columns in increasing order.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row >= self.rows {
                break;
            }
            let Some(src) = (pivot_row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if src != pivot_row {
                for j in 0..self.cols {
                    self.entries.swap(src * self.cols + j, pivot_row * self.cols + j);
                }
            }
            let inv = T::one() / self.at(pivot_row, col).clone();
            for j in col..self.cols {
                let v = self.at(pivot_row, j).clone() * inv.clone();
                *self.at_mut(pivot_row, j) = v;
            }
            for r in 0..self.rows {
                if r == pivot_row || self.at(r, col).is_zero() {
                    continue;
                }
                let factor = self.at(r, col).clone();
                for j in col..self.cols {
                    let v = self.at(r, j).clone() - factor.clone() * self.at(pivot_row, j).clone();
                    *self.at_mut(r, j) = v;
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of `{ x : self * x = 0 }`.
    ///
    /// Convention: reduced row echelon with leftmost pivots; each free column,
    /// in increasing column order, yields one basis vector with a 1 in that
    /// slot. Basis size is `cols - rank`.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.at(row, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Canonical solution of `self * x = rhs` (free variables set to zero),
    /// or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[T]) -> Option<Vec<T>> {
        assert_eq!(rhs.len(), self.rows, "rhs length must match rows");
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = rhs[i].clone();
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = aug.at(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn vstack(top: &Self, bottom: &Self) -> Self {
        assert_eq!(top.cols, bottom.cols, "column counts must agree");
        let mut entries = top.entries.clone();
        entries.extend(bottom.entries.iter().cloned());
        Matrix {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            entries,
        }
    }
}

impl GaussMatrix {
    /// Checks `entry(i,j) == conj(entry(j,i))` for all entries; on failure
    /// returns the offending `(i, j)`.
    pub fn hermitian_defect(&self) -> Option<(usize, usize)> {
        assert_eq!(self.rows, self.cols, "hermitian check needs a square matrix");
        for i in 0..self.rows {
            for j in i..self.cols {
                if *self.at(i, j) != cconj(self.at(j, i)) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = GaussMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = cconj(self.at(i, j));
            }
        }
        out
    }

    /// The `2 rows x 2 cols` rational matrix of `x -> m*x` under the basis
    /// splitting each complex coordinate into `(re, im)`.
    pub fn realify(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.at(i, j);
                *out.at_mut(2 * i, 2 * j) = e.re.clone();
                *out.at_mut(2 * i, 2 * j + 1) = -e.im.clone();
                *out.at_mut(2 * i + 1, 2 * j) = e.im.clone();
                *out.at_mut(2 * i + 1, 2 * j + 1) = e.re.clone();
            }
        }
        out
    }
}
