//! Exact multivariate polynomials of total degree at most two, and the public
//! quadratic-form type with its kernel computation.
//!
//! This is deliberately not a general computer-algebra layer: the only product
//! ever needed is affine times affine, which closes in degree two.  A degree-2
//! polynomial is stored as constant + linear vector + symmetric matrix, so
//! evaluation is constant + l . mu + mu^T M mu.

use serde::{Deserialize, Serialize};

use super::matrix::RationalMatrix;
use super::BmyError;
use crate::rational::Rational;

/// Internal degree <= 2 polynomial in `nvars` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QuadPoly {
    nvars: usize,
    constant: Rational,
    linear: Vec<Rational>,
    quad: Vec<Vec<Rational>>,
}

impl QuadPoly {
    pub(crate) fn constant(nvars: usize, value: Rational) -> Self {
        QuadPoly {
            nvars,
            constant: value,
            linear: vec![Rational::zero(); nvars],
            quad: vec![vec![Rational::zero(); nvars]; nvars],
        }
    }

    pub(crate) fn zero(nvars: usize) -> Self {
        QuadPoly::constant(nvars, Rational::zero())
    }

    /// The affine polynomial c + sum_i l_i x_i.
    pub(crate) fn affine(nvars: usize, c: Rational, linear: Vec<Rational>) -> Self {
        assert_eq!(linear.len(), nvars, "linear part has wrong length");
        QuadPoly {
            nvars,
            constant: c,
            linear,
            quad: vec![vec![Rational::zero(); nvars]; nvars],
        }
    }

    pub(crate) fn variable(nvars: usize, index: usize) -> Self {
        let mut linear = vec![Rational::zero(); nvars];
        linear[index] = Rational::one();
        QuadPoly::affine(nvars, Rational::zero(), linear)
    }

    fn is_affine(&self) -> bool {
        self.quad.iter().flatten().all(Rational::is_zero)
    }

    pub(crate) fn add_scaled(&mut self, other: &QuadPoly, factor: &Rational) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        self.constant = &self.constant + &other.constant * factor;
        for i in 0..self.nvars {
            self.linear[i] = &self.linear[i] + &other.linear[i] * factor;
            for j in 0..self.nvars {
                self.quad[i][j] = &self.quad[i][j] + &other.quad[i][j] * factor;
            }
        }
    }

    pub(crate) fn add(&mut self, other: &QuadPoly) {
        self.add_scaled(other, &Rational::one());
    }

    pub(crate) fn scale(&mut self, factor: &Rational) {
        self.constant = &self.constant * factor;
        for i in 0..self.nvars {
            self.linear[i] = &self.linear[i] * factor;
            for j in 0..self.nvars {
                self.quad[i][j] = &self.quad[i][j] * factor;
            }
        }
    }

    /// Product of two affine polynomials; the symmetric matrix receives
    /// (a_i b_j + a_j b_i) / 2.  Panics if either factor already has degree 2,
    /// because the result would leave the closed degree-2 space.
    pub(crate) fn mul_affine(&self, other: &QuadPoly) -> QuadPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        assert!(
            self.is_affine() && other.is_affine(),
            "only affine polynomials can be multiplied"
        );
        let nvars = self.nvars;
        let mut out = QuadPoly::zero(nvars);
        out.constant = &self.constant * &other.constant;
        for i in 0..nvars {
            out.linear[i] =
                &self.constant * &other.linear[i] + &other.constant * &self.linear[i];
            for j in 0..nvars {
                let cross = &self.linear[i] * &other.linear[j]
                    + &self.linear[j] * &other.linear[i];
                out.quad[i][j] = cross / Rational::from_int(2);
            }
        }
        out
    }

    pub(crate) fn square_affine(&self) -> QuadPoly {
        self.mul_affine(self)
    }

    #[cfg(test)]
    pub(crate) fn evaluate(&self, mu: &[Rational]) -> Rational {
        assert_eq!(mu.len(), self.nvars, "evaluation point has wrong length");
        let mut total = self.constant.clone();
        for i in 0..self.nvars {
            total = total + &self.linear[i] * &mu[i];
            for j in 0..self.nvars {
                total = total + &self.quad[i][j] * &mu[i] * &mu[j];
            }
        }
        total
    }

    pub(crate) fn into_parts(self) -> (Rational, Vec<Rational>, Vec<Vec<Rational>>) {
        (self.constant, self.linear, self.quad)
    }
}

/// A quadratic form (in general an inhomogeneous degree-2 polynomial) over
/// named variables: evaluation is constant + linear . mu + mu^T matrix mu with
/// a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub variables: Vec<String>,
    pub constant: Rational,
    pub linear: Vec<Rational>,
    pub matrix: Vec<Vec<Rational>>,
}

/// Exact nullspace of the quadratic part, in reduced echelon convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelBasis {
    pub dimension: usize,
    pub basis: Vec<Vec<Rational>>,
}

impl QuadraticForm {
    /// Validates dimensions and symmetry of the stored matrix.
    pub fn check(&self) -> Result<(), BmyError> {
        let n = self.variables.len();
        if self.linear.len() != n || self.matrix.len() != n {
            return Err(BmyError::MatrixShape {
                row: 0,
                expected: n,
                got: self.matrix.len(),
            });
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(BmyError::MatrixShape {
                    row: i,
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.matrix[i][j] != self.matrix[j][i] {
                    return Err(BmyError::InvalidArrangement(format!(
                        "quadratic form matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, mu: &[Rational]) -> Result<Rational, BmyError> {
        self.check()?;
        if mu.len() != self.variables.len() {
            return Err(BmyError::WeightCount {
                expected: self.variables.len(),
                got: mu.len(),
            });
        }
        let mut total = self.constant.clone();
        for i in 0..mu.len() {
            total = total + &self.linear[i] * &mu[i];
            for j in 0..mu.len() {
                total = total + &self.matrix[i][j] * &mu[i] * &mu[j];
            }
        }
        Ok(total)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant.is_zero() && self.linear.iter().all(Rational::is_zero)
    }

    /// Exact kernel of the quadratic part.  Requires a homogeneous form so
    /// that "kernel" is unambiguous; surviving constant or linear parts are
    /// reported in the error rather than silently dropped.
    pub fn kernel(&self) -> Result<KernelBasis, BmyError> {
        self.check()?;
        if !self.is_homogeneous() {
            return Err(BmyError::NonHomogeneous {
                constant: self.constant.clone(),
                linear: self.linear.clone(),
            });
        }
        let m = RationalMatrix::from_rows(self.matrix.clone())?;
        let basis = m.nullspace();
        Ok(KernelBasis {
            dimension: basis.len(),
            basis,
        })
    }

    pub(crate) fn from_poly(variables: Vec<String>, poly: QuadPoly) -> Self {
        let (constant, linear, matrix) = poly.into_parts();
        assert_eq!(variables.len(), linear.len(), "variable name count mismatch");
        QuadraticForm {
            variables,
            constant,
            linear,
            matrix,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn affine_product_expands_exactly() {
        // (1 + 2x) (3 - y) = 3 + 6x - y - 2xy.
        let a = QuadPoly::affine(2, q(1, 1), vec![q(2, 1), q(0, 1)]);
        let b = QuadPoly::affine(2, q(3, 1), vec![q(0, 1), q(-1, 1)]);
        let p = a.mul_affine(&b);
        let (c, l, m) = p.clone().into_parts();
        assert_eq!(c, q(3, 1));
        assert_eq!(l, vec![q(6, 1), q(-1, 1)]);
        assert_eq!(m[0][1], q(-1, 1));
        assert_eq!(m[1][0], q(-1, 1));
        assert_eq!(m[0][0], q(0, 1));
        // Evaluation agrees with direct substitution at (x, y) = (1/2, 3).
        let direct = (q(1, 1) + q(2, 1) * q(1, 2)) * (q(3, 1) - q(3, 1));
        assert_eq!(p.evaluate(&[q(1, 2), q(3, 1)]), direct);
    }

    #[test]
    fn square_of_affine_matches_hand_expansion() {
        // (1 - (x + y)/2)^2 = 1 - x - y + x^2/4 + xy/2 + y^2/4.
        let g = QuadPoly::affine(2, q(1, 1), vec![q(-1, 2), q(-1, 2)]);
        let p = g.square_affine();
        let (c, l, m) = p.into_parts();
        assert_eq!(c, q(1, 1));
        assert_eq!(l, vec![q(-1, 1), q(-1, 1)]);
        assert_eq!(m[0][0], q(1, 4));
        assert_eq!(m[1][1], q(1, 4));
        assert_eq!(m[0][1], q(1, 4));
        assert_eq!(m[1][0], q(1, 4));
    }

    #[test]
    #[should_panic(expected = "only affine")]
    fn degree_overflow_panics() {
        let x = QuadPoly::variable(1, 0);
        let x2 = x.square_affine();
        let _ = x2.mul_affine(&x);
    }

    #[test]
    fn form_evaluation_matches_components() {
        let form = QuadraticForm {
            variables: vec!["a".into(), "b".into()],
            constant: q(5, 1),
            linear: vec![q(1, 2), q(-1, 3)],
            matrix: vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(0, 1)]],
        };
        // 5 + a/2 - b/3 + a^2 + 4ab at (a, b) = (1, 2).
        let expected = q(5, 1) + q(1, 2) - q(2, 3) + q(1, 1) + q(8, 1);
        assert_eq!(form.evaluate(&[q(1, 1), q(2, 1)]).unwrap(), expected);
    }

    #[test]
    fn identity_form_has_trivial_kernel() {
        let form = QuadraticForm {
            variables: vec!["a".into(), "b".into(), "c".into()],
            constant: Rational::zero(),
            linear: vec![Rational::zero(); 3],
            matrix: vec![
                vec![q(1, 1), q(0, 1), q(0, 1)],
                vec![q(0, 1), q(1, 1), q(0, 1)],
                vec![q(0, 1), q(0, 1), q(1, 1)],
            ],
        };
        let kernel = form.kernel().unwrap();
        assert_eq!(kernel.dimension, 0);
        assert!(kernel.basis.is_empty());
    }

    #[test]
    fn kernel_rejects_inhomogeneous_forms() {
        let form = QuadraticForm {
            variables: vec!["a".into()],
            constant: Rational::zero(),
            linear: vec![q(3, 1)],
            matrix: vec![vec![q(1, 1)]],
        };
        match form.kernel() {
            Err(BmyError::NonHomogeneous { constant, linear }) => {
                assert!(constant.is_zero());
                assert_eq!(linear, vec![q(3, 1)]);
            }
            other => panic!("expected NonHomogeneous, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let form = QuadraticForm {
            variables: vec!["a".into(), "b".into()],
            constant: Rational::zero(),
            linear: vec![Rational::zero(); 2],
            matrix: vec![vec![q(0, 1), q(1, 1)], vec![q(2, 1), q(0, 1)]],
        };
        assert!(form.kernel().is_err());
    }
}
