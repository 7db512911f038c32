//! High-order finite differences for complex Hessians of real potentials.
//!
//! A potential phi maps a chart point of C^N to a real value; the complex
//! Hessian entries are Wirtinger derivatives assembled from real second
//! derivatives over the 2N real coordinates x_a = Re z_a, y_a = Im z_a:
//!
//!   d^2 phi / dz_a dzbar_b
//!     = 1/4 [ (d_{x_a x_b} + d_{y_a y_b}) phi + i (d_{x_a y_b} - d_{y_a x_b}) phi ].
//!
//! Real second derivatives use 4th-order central stencils (a 5-point stencil
//! for pure seconds, the 16-point cross of two first-derivative stencils for
//! mixed seconds), sharpened to 6th order by one Richardson step over the two
//! step levels h and h/2.  The leading error after extrapolation is
//! f^(8) h^6 / 20160, so step budgeting against the distance to the singular
//! locus is what controls accuracy.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// A real-valued potential on a chart of C^N.
pub(crate) type Potential<'a> = dyn Fn(&[Complex64]) -> f64 + 'a;

/// Coordinates are indexed 0..2N: coordinate 2a is Re z_a, 2a+1 is Im z_a.
fn perturb(z: &[Complex64], coord: usize, delta: f64) -> Vec<Complex64> {
    let mut out = z.to_vec();
    if coord % 2 == 0 {
        out[coord / 2].re += delta;
    } else {
        out[coord / 2].im += delta;
    }
    out
}

fn perturb2(z: &[Complex64], ca: usize, da: f64, cb: usize, db: f64) -> Vec<Complex64> {
    perturb(&perturb(z, ca, da), cb, db)
}

/// 4th-order pure second derivative along one real coordinate.
fn d2_pure(f: &Potential, z: &[Complex64], coord: usize, h: f64) -> f64 {
    let eval = |d: f64| f(&perturb(z, coord, d));
    (-eval(-2.0 * h) + 16.0 * eval(-h) - 30.0 * eval(0.0) + 16.0 * eval(h) - eval(2.0 * h))
        / (12.0 * h * h)
}

/// Offsets and weights of the 4th-order central first derivative; the mixed
/// second derivative is the tensor product of two of these.
const D1: [(f64, f64); 4] = [
    (-2.0, 1.0 / 12.0),
    (-1.0, -2.0 / 3.0),
    (1.0, 2.0 / 3.0),
    (2.0, -1.0 / 12.0),
];

/// 4th-order mixed second derivative along two distinct real coordinates.
fn d2_mixed(f: &Potential, z: &[Complex64], ca: usize, cb: usize, h: f64) -> f64 {
    debug_assert_ne!(ca, cb);
    let mut total = 0.0;
    for &(sa, wa) in &D1 {
        for &(sb, wb) in &D1 {
            total += wa * wb * f(&perturb2(z, ca, sa * h, cb, sb * h));
        }
    }
    total / (h * h)
}

/// One Richardson step for a 4th-order quantity: (16 D(h/2) - D(h)) / 15.
fn richardson(d: impl Fn(f64) -> f64, h: f64) -> f64 {
    (16.0 * d(h / 2.0) - d(h)) / 15.0
}

/// Complex Hessian d^2 phi / dz_a dzbar_b as an N x N Hermitian matrix.
/// Entries with a < b are computed once and mirrored by conjugation, and the
/// diagonal keeps only its real part, so the output is Hermitian exactly.
pub(crate) fn complex_hessian(f: &Potential, z: &[Complex64], h: f64) -> DMatrix<Complex64> {
    let n = z.len();
    let mut out = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for a in 0..n {
        let xx = richardson(|s| d2_pure(f, z, 2 * a, s), h);
        let yy = richardson(|s| d2_pure(f, z, 2 * a + 1, s), h);
        out[(a, a)] = Complex64::new((xx + yy) / 4.0, 0.0);
        for b in (a + 1)..n {
            let xx = richardson(|s| d2_mixed(f, z, 2 * a, 2 * b, s), h);
            let yy = richardson(|s| d2_mixed(f, z, 2 * a + 1, 2 * b + 1, s), h);
            let xy = richardson(|s| d2_mixed(f, z, 2 * a, 2 * b + 1, s), h);
            let yx = richardson(|s| d2_mixed(f, z, 2 * a + 1, 2 * b, s), h);
            let entry = Complex64::new((xx + yy) / 4.0, (xy - yx) / 4.0);
            out[(a, b)] = entry;
            out[(b, a)] = entry.conj();
        }
    }
    out
}

/// Determinant of a Hermitian matrix for N <= 3, as a real number (the
/// imaginary part of a Hermitian determinant is identically zero).
pub(crate) fn hermitian_det(m: &DMatrix<Complex64>) -> f64 {
    match m.nrows() {
        1 => m[(0, 0)].re,
        2 => (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re,
        3 => {
            let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
            det.re
        }
        n => panic!("hermitian_det supports N <= 3, got {n}"),
    }
}

/// Eigenvalue range of a Hermitian matrix via its real symmetric embedding
/// [[X, -Y], [Y, X]] for M = X + iY, whose spectrum is that of M doubled.
pub(crate) fn hermitian_eigen_range(m: &DMatrix<Complex64>) -> (f64, f64) {
    let n = m.nrows();
    let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            real[(i, j)] = m[(i, j)].re;
            real[(i + n, j + n)] = m[(i, j)].re;
            real[(i, j + n)] = -m[(i, j)].im;
            real[(i + n, j)] = m[(i, j)].im;
        }
    }
    let eigen = real.symmetric_eigenvalues();
    let min = eigen.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eigen.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}
