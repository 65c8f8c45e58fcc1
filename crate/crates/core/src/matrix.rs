//! Dense exact matrices with Gaussian elimination.
//!
//! Pivoting is deterministic: the first nonzero entry in column order wins,
//! so echelon forms, ranks and kernel bases are reproducible across runs.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    entries: Vec<Scalar>, // row-major
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, field, entries: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one(field);
        }
        m
    }

    /// Build from row vectors; all rows must share one length and one field.
    pub fn from_rows(field: FieldSpec, rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            for x in row {
                assert_eq!(x.field(), field, "field mismatch");
                entries.push(x.clone());
            }
        }
        Matrix { rows: rows.len(), cols, field, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        assert_eq!(self.field, rhs.field, "field mismatch");
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a.mul(&rhs[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&add);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length differs from column count");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(self.field);
                for j in 0..self.cols {
                    acc = acc.add(&self[(i, j)].mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..m.cols {
            let Some(pivot_row) = (next_row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(next_row, pivot_row);
            let inv = m[(next_row, col)].inv();
            for j in col..m.cols {
                m[(next_row, j)] = m[(next_row, j)].mul(&inv);
            }
            for r in 0..m.rows {
                if r != next_row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for j in col..m.cols {
                        let sub = factor.mul(&m[(next_row, j)]);
                        m[(r, j)] = m[(r, j)].sub(&sub);
                    }
                }
            }
            pivots.push(col);
            next_row += 1;
            if next_row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    /// Canonical basis of `{v : self * v = 0}`: one vector per free column,
    /// ordered by free column index, with a 1 in the free position.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let one = Scalar::one(self.field);
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(self.field); self.cols];
            v[free] = one.clone();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = r[(row, free)].neg();
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.entries[i * self.cols + j]
    }
}

/// Matrix whose kernel is exactly the span of the given vectors in F^d.
///
/// The rows are the canonical kernel basis of the matrix stacking the input
/// vectors, so the result has d - dim(span) rows and is deterministic.
pub fn annihilator(field: FieldSpec, dim: usize, vectors: &[Vec<Scalar>]) -> Result<Matrix> {
    if vectors.is_empty() {
        return Err(Error::InvalidArgument("annihilator of an empty family".into()));
    }
    for v in vectors {
        if v.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} in ambient dimension {dim}",
                v.len()
            )));
        }
    }
    let stacked = Matrix::from_rows(field, vectors);
    let kernel = stacked.kernel_basis();
    if kernel.is_empty() {
        return Err(Error::SpanIsFullSpace);
    }
    Ok(Matrix::from_rows(field, &kernel))
}
