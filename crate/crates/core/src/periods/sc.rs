//! Schwarz-Christoffel map of the upper half plane onto an equilateral
//! triangle: F(z) = integral_0^z t^{-2/3} (1 - t)^{-2/3} dt.
//!
//! All three exponents (at 0, 1 and infinity) equal 2/3, so the boundary
//! turns by pi/3 at each of the three prevertices and the image of the real
//! line is an equilateral triangle with vertices F(0) = 0, F(1) real
//! positive, and the finite image of infinity.  Substituting t = z s puts
//! the singularity at 0 into a Jacobi weight; the remaining factor
//! (1 - z s)^{-2/3} uses the principal branch, which is continuous because
//! Im(1 - z s) = -s Im(z) never changes sign.  Only real z > 1 put the
//! branch point at 1 on the path, and those are rejected.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::contour::{assert_branch_continuity, converge, PeriodValue};
use super::jacobi::gauss_jacobi;
use super::PeriodError;

/// Common exponent of the triangle map.
const MU: f64 = 2.0 / 3.0;

/// Relative agreement demanded between consecutive rule orders.
const REL_TOL: f64 = 1e-12;

/// Minimal distance of the branch point at 1 from the path [0, z].
const MARGIN: f64 = 1e-3;

/// Evaluations closer to the prevertex 1 than this are treated as the
/// vertex itself, where the integral is a complete beta value.
const VERTEX_SNAP: f64 = 1e-12;

/// Image of z under the triangle map, integrated along the straight
/// segment from 0.
pub fn sc_map(z: Complex64) -> Result<PeriodValue, PeriodError> {
    if z.norm() == 0.0 {
        return Ok(PeriodValue {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            order: 0,
        });
    }
    if (z - 1.0).norm() < VERTEX_SNAP {
        // F(1) = B(1/3, 1/3): both endpoint factors go into the weight.
        return converge(
            |order| {
                Ok(gauss_jacobi(-MU, -MU, order)?
                    .integrate(|_| Complex64::new(1.0, 0.0)))
            },
            REL_TOL,
            "triangle map vertex value",
        );
    }

    // Distance from the branch point 1 to the segment [0, z].
    let t = (z.re / z.norm_sqr()).clamp(0.0, 1.0);
    let dist = (Complex64::new(1.0, 0.0) - z * t).norm();
    if dist < MARGIN {
        return Err(PeriodError::PunctureOnSegment {
            index: 1,
            distance: dist,
            margin: MARGIN,
        });
    }
    assert_branch_continuity(|s| (Complex64::new(1.0, 0.0) - z * s).arg());

    let prefactor = z.powf(1.0 / 3.0);
    converge(
        |order| {
            let rule = gauss_jacobi(-MU, 0.0, order)?;
            Ok(prefactor * rule.integrate(|s| (Complex64::new(1.0, 0.0) - z * s).powf(-MU)))
        },
        REL_TOL,
        "triangle map order ladder",
    )
}

/// Finite image of the prevertex at infinity, integrated from 0 straight up
/// the imaginary axis: t = i r and r = u / (1 - u) give
/// i e^{-i pi / 3} integral u^{-2/3} (1-u)^{-2/3} (1 - u (1 + i))^{-2/3} du.
pub fn sc_vertex_at_infinity() -> Result<PeriodValue, PeriodError> {
    let phase = Complex64::i() * Complex64::from_polar(1.0, -PI / 3.0);
    let pivot = Complex64::new(1.0, 1.0);
    assert_branch_continuity(|u| (Complex64::new(1.0, 0.0) - pivot * u).arg());
    converge(
        |order| {
            let rule = gauss_jacobi(-MU, -MU, order)?;
            Ok(phase * rule.integrate(|u| (Complex64::new(1.0, 0.0) - pivot * u).powf(-MU)))
        },
        REL_TOL,
        "triangle vertex at infinity",
    )
}

/// Side lengths of the image triangle (base, far side, left side) together
/// with their largest relative disagreement; an equilateral image is the
/// acceptance check for the map.
pub fn sc_side_lengths() -> Result<([f64; 3], f64), PeriodError> {
    let base = sc_map(Complex64::new(1.0, 0.0))?.value;
    let apex = sc_vertex_at_infinity()?.value;
    let sides = [base.norm(), (apex - base).norm(), apex.norm()];
    let max = sides.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = sides.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((sides, (max - min) / max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::contour::tanh_sinh;
    use std::f64::consts::FRAC_PI_3;

    /// Gamma(1/3)^2 / Gamma(2/3).
    const BETA_THIRD_THIRD: f64 = 5.299_916_250_856_349_5;

    #[test]
    fn map_fixes_the_standard_vertices() {
        assert_eq!(sc_map(Complex64::new(0.0, 0.0)).unwrap().value.norm(), 0.0);
        let base = sc_map(Complex64::new(1.0, 0.0)).unwrap().value;
        assert!((base.im).abs() < 1e-14);
        let rel = (base.re - BETA_THIRD_THIRD).abs() / BETA_THIRD_THIRD;
        assert!(rel < 1e-10, "relative deviation {rel:.3e}");
    }

    #[test]
    fn interval_midpoint_maps_to_half_base() {
        // The integrand is symmetric under t -> 1 - t.
        let half = sc_map(Complex64::new(0.5, 0.0)).unwrap().value;
        let rel = (half.re - BETA_THIRD_THIRD / 2.0).abs() / BETA_THIRD_THIRD;
        assert!(rel < 1e-10);
        assert!(half.im.abs() < 1e-12);
    }

    #[test]
    fn interior_point_matches_tanh_sinh() {
        let z = Complex64::new(0.0, 1.0);
        let got = sc_map(z).unwrap().value;
        let oracle = z.powf(1.0 / 3.0)
            * tanh_sinh(|s, _| {
                Complex64::new(s.powf(-MU), 0.0)
                    * (Complex64::new(1.0, 0.0) - z * s).powf(-MU)
            });
        assert!((got - oracle).norm() / oracle.norm() < 1e-9);
    }

    #[test]
    fn image_triangle_is_equilateral() {
        let (sides, spread) = sc_side_lengths().unwrap();
        assert!(spread < 1e-6, "side spread {spread:.3e}, sides {sides:?}");
        // Orientation pins the apex exactly at the base rotated by pi/3.
        let base = sc_map(Complex64::new(1.0, 0.0)).unwrap().value;
        let apex = sc_vertex_at_infinity().unwrap().value;
        let predicted = base * Complex64::from_polar(1.0, FRAC_PI_3);
        assert!((apex - predicted).norm() / apex.norm() < 1e-9);
    }

    #[test]
    fn branch_point_on_path_is_rejected() {
        let err = sc_map(Complex64::new(1.5, 0.0)).unwrap_err();
        assert!(matches!(
            err,
            PeriodError::PunctureOnSegment { index: 1, .. }
        ));
    }
}
