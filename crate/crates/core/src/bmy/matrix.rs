//! Dense rational matrices with exact reduced row echelon form, rank, and
//! nullspace.  Pivoting is deterministic (first nonzero entry in column
//! order), so echelon forms and nullspace bases are reproducible.

use serde::{Deserialize, Serialize};

use super::BmyError;
use crate::rational::Rational;

/// A rectangular matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn from_rows(data: Vec<Vec<Rational>>) -> Result<Self, BmyError> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        for (i, row) in data.iter().enumerate() {
            if row.len() != cols {
                return Err(BmyError::MatrixShape {
                    row: i,
                    expected: cols,
                    got: row.len(),
                });
            }
        }
        Ok(RationalMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        RationalMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.data[i][j]
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Reduced row echelon form and the pivot columns, computed by exact
    /// Gauss-Jordan elimination.  The pivot in each column is the first row
    /// not yet used, making the result (and everything derived from it)
    /// deterministic.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.data.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            let Some(src) = (pivot_row..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(pivot_row, src);
            let inv = m[pivot_row][col].recip();
            for entry in m[pivot_row].iter_mut() {
                *entry = &*entry * &inv;
            }
            for r in 0..self.rows {
                if r == pivot_row || m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                for c in 0..self.cols {
                    let delta = &factor * &m[pivot_row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
            pivots.push(col);
            pivot_row += 1;
            if pivot_row == self.rows {
                break;
            }
        }
        (
            RationalMatrix {
                rows: self.rows,
                cols: self.cols,
                data: m,
            },
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace in reduced echelon convention: one vector
    /// per free column, carrying 1 in that coordinate and the negated reduced
    /// column entries in the pivot coordinates.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -&r.data[row][f];
                }
                v
            })
            .collect()
    }
}
