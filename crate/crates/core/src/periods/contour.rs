//! Straight-segment and ray periods of the multivalued differential
//! prod_l (t - p_l)^{-mu_l} dt.
//!
//! The path runs between two punctures (segment) or from a puncture to
//! infinity (ray).  Endpoint singularities go into the Gauss-Jacobi weight;
//! each remaining factor is made single-valued by fixing a branch cut that
//! points away from the path: for a segment the cut at p_l is antipodal to
//! the direction from p_l to the segment midpoint (the directions from p_l
//! to segment points span less than pi, so the antipode is never among
//! them), and for a ray the rotated factor u - w_l (1-u) has imaginary part
//! -(1-u) Im w_l of constant sign, so the principal branch works.  Both
//! facts are re-asserted at runtime by walking the path and checking the
//! chosen argument never jumps.  Values are accepted once two consecutive
//! rule orders agree to the requested relative tolerance.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use super::jacobi::{gauss_jacobi, JacobiRule};
use super::PeriodError;

/// Rule orders tried in sequence until two consecutive values agree.
const ORDER_LADDER: [usize; 6] = [16, 24, 32, 48, 64, 96];

/// Sample count of the branch-continuity walk along a path.
const CONTINUITY_SAMPLES: usize = 65;

/// A converged period with its a-posteriori error estimate (the distance
/// between the last two ladder orders) and the accepting order.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PeriodValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub order: usize,
}

/// Argument of w measured against a branch cut along direction `cut`,
/// taking values in (cut - 2 pi, cut].
fn arg_cut(w: Complex64, cut: f64) -> f64 {
    cut - PI + (w * Complex64::from_polar(1.0, PI - cut)).arg()
}

/// w^{-mu} with the branch cut of the argument along direction `cut`.
fn pow_cut(w: Complex64, mu: f64, cut: f64) -> Complex64 {
    Complex64::from_polar(w.norm().powf(-mu), -mu * arg_cut(w, cut))
}

/// Distance from `x` to the closed segment [p, q].
fn segment_distance(p: Complex64, q: Complex64, x: Complex64) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (x - p).norm();
    }
    let t = (((x - p) * d.conj()).re / len2).clamp(0.0, 1.0);
    (x - (p + d * t)).norm()
}

/// Walks the path parameter through [0, 1] and asserts the branch argument
/// never moves by a quarter turn between neighbouring samples, which a cut
/// crossing would force.
pub(crate) fn assert_branch_continuity(arg_at: impl Fn(f64) -> f64) {
    let mut prev = arg_at(0.0);
    for k in 1..CONTINUITY_SAMPLES {
        let s = k as f64 / (CONTINUITY_SAMPLES - 1) as f64;
        let a = arg_at(s);
        assert!(
            (a - prev).abs() < FRAC_PI_2,
            "branch cut crosses the integration path"
        );
        prev = a;
    }
}

/// Prepared integrand for the period along the segment [p_i, p_j]:
/// substituting t = p + (q - p) s turns the two endpoint factors into the
/// Jacobi weight s^{-mu_i} (1 - s)^{-mu_j} times a constant prefactor, and
/// every other factor into a smooth branch-fixed function of s.
pub(crate) struct SegmentPlan {
    p: Complex64,
    d: Complex64,
    prefactor: Complex64,
    a: f64,
    b: f64,
    others: Vec<(Complex64, f64, f64)>,
}

impl SegmentPlan {
    pub(crate) fn new(
        punctures: &[Complex64],
        exponents: &[f64],
        i: usize,
        j: usize,
        margin: f64,
    ) -> Result<Self, PeriodError> {
        assert_eq!(punctures.len(), exponents.len());
        assert!(i != j && i < punctures.len() && j < punctures.len());
        let p = punctures[i];
        let q = punctures[j];
        let d = q - p;
        assert!(d.norm() > 0.0, "segment endpoints coincide");
        let mid = (p + q) * 0.5;

        let mut others = Vec::new();
        for (l, (&pl, &ml)) in punctures.iter().zip(exponents).enumerate() {
            if l == i || l == j {
                continue;
            }
            let dist = segment_distance(p, q, pl);
            if dist < margin {
                return Err(PeriodError::PunctureOnSegment {
                    index: l,
                    distance: dist,
                    margin,
                });
            }
            let cut = (mid - pl).arg() + PI;
            others.push((pl, ml, cut));
        }
        for &(pl, _, cut) in &others {
            assert_branch_continuity(|s| arg_cut(p + d * s - pl, cut));
        }

        // p - q, not -d: negation would flip the sign of a zero imaginary
        // part and with it the principal argument of a negative real.
        let prefactor = d * d.powf(-exponents[i]) * (p - q).powf(-exponents[j]);
        Ok(SegmentPlan {
            p,
            d,
            prefactor,
            a: -exponents[i],
            b: -exponents[j],
            others,
        })
    }

    /// Jacobi exponent pair of the endpoint weight.
    pub(crate) fn rule_exponents(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Applies a rule with matching exponents to the smooth factor.
    pub(crate) fn eval_with(&self, rule: &JacobiRule) -> Complex64 {
        let smooth: Complex64 = rule.integrate(|s| {
            let t = self.p + self.d * s;
            self.others
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &(pl, ml, cut)| {
                    acc * pow_cut(t - pl, ml, cut)
                })
        });
        self.prefactor * smooth
    }

    fn eval(&self, order: usize) -> Result<Complex64, PeriodError> {
        Ok(self.eval_with(&gauss_jacobi(self.a, self.b, order)?))
    }
}

/// Prepared integrand for the period from p_i to infinity along direction
/// e^{i theta}: with t = p + e^{i theta} r and r = u / (1 - u) the period is
/// e^{i theta (1 - sigma)} integral u^{-mu_i} (1-u)^{sigma - 2}
/// prod_{l != i} (u - w_l (1 - u))^{-mu_l} du, w_l = (p_l - p) e^{-i theta}.
pub(crate) struct RayPlan {
    phase: Complex64,
    a: f64,
    b: f64,
    others: Vec<(Complex64, f64)>,
}

impl RayPlan {
    pub(crate) fn new(
        punctures: &[Complex64],
        exponents: &[f64],
        i: usize,
        theta: f64,
        margin: f64,
    ) -> Result<Self, PeriodError> {
        assert_eq!(punctures.len(), exponents.len());
        assert!(i < punctures.len());
        let p = punctures[i];
        let sigma: f64 = exponents.iter().sum();
        if sigma <= 1.0 {
            // The implied exponent at infinity is 2 - sigma >= 1.
            return Err(PeriodError::NonIntegrable {
                index: punctures.len(),
                exponent: 2.0 - sigma,
            });
        }

        let rot = Complex64::from_polar(1.0, -theta);
        let mut others = Vec::new();
        for (l, (&pl, &ml)) in punctures.iter().zip(exponents).enumerate() {
            if l == i {
                continue;
            }
            let w = (pl - p) * rot;
            let dist = if w.re >= 0.0 { w.im.abs() } else { w.norm() };
            if dist < margin {
                return Err(PeriodError::PunctureOnSegment {
                    index: l,
                    distance: dist,
                    margin,
                });
            }
            others.push((w, ml));
        }
        for &(w, _) in &others {
            assert_branch_continuity(|u| (Complex64::new(u, 0.0) - w * (1.0 - u)).arg());
        }

        Ok(RayPlan {
            phase: Complex64::from_polar(1.0, theta * (1.0 - sigma)),
            a: -exponents[i],
            b: sigma - 2.0,
            others,
        })
    }

    pub(crate) fn rule_exponents(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub(crate) fn eval_with(&self, rule: &JacobiRule) -> Complex64 {
        let smooth: Complex64 = rule.integrate(|u| {
            self.others
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &(w, ml)| {
                    acc * (Complex64::new(u, 0.0) - w * (1.0 - u)).powf(-ml)
                })
        });
        self.phase * smooth
    }

    fn eval(&self, order: usize) -> Result<Complex64, PeriodError> {
        Ok(self.eval_with(&gauss_jacobi(self.a, self.b, order)?))
    }
}

/// Runs the order ladder until two consecutive values agree to `rel_tol`
/// relative to the newer value.
pub(crate) fn converge<F>(mut eval: F, rel_tol: f64, context: &str) -> Result<PeriodValue, PeriodError>
where
    F: FnMut(usize) -> Result<Complex64, PeriodError>,
{
    let mut prev: Option<Complex64> = None;
    let mut achieved = f64::INFINITY;
    for &order in ORDER_LADDER.iter() {
        let value = eval(order)?;
        if let Some(last) = prev {
            let diff = (value - last).norm();
            let scale = value.norm().max(1e-300);
            if diff <= rel_tol * scale {
                return Ok(PeriodValue {
                    value,
                    error_estimate: diff,
                    order,
                });
            }
            achieved = diff / scale;
        }
        prev = Some(value);
    }
    Err(PeriodError::ToleranceNotMet {
        context: context.to_string(),
        achieved,
        required: rel_tol,
    })
}

pub(crate) fn segment_period(
    punctures: &[Complex64],
    exponents: &[f64],
    i: usize,
    j: usize,
    margin: f64,
    rel_tol: f64,
) -> Result<PeriodValue, PeriodError> {
    let plan = SegmentPlan::new(punctures, exponents, i, j, margin)?;
    converge(
        |order| plan.eval(order),
        rel_tol,
        "segment period order ladder",
    )
}

pub(crate) fn ray_period(
    punctures: &[Complex64],
    exponents: &[f64],
    i: usize,
    theta: f64,
    margin: f64,
    rel_tol: f64,
) -> Result<PeriodValue, PeriodError> {
    let plan = RayPlan::new(punctures, exponents, i, theta, margin)?;
    converge(|order| plan.eval(order), rel_tol, "ray period order ladder")
}

/// Tanh-sinh quadrature of integral_0^1 f(t, 1-t) dt for integrands with
/// integrable endpoint singularities; the second argument receives 1 - t
/// computed without cancellation.  Test oracle only: slow and 1D, but its
/// error behaviour is entirely unlike a Jacobi rule's.
#[cfg(test)]
pub(crate) fn tanh_sinh<F>(f: F) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    use std::f64::consts::FRAC_PI_4;
    let eval = |h: f64| -> Complex64 {
        let kmax = (4.0 / h).floor() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -kmax..=kmax {
            let x = k as f64 * h;
            let y = FRAC_PI_2 * x.sinh();
            let t = 1.0 / (1.0 + (-2.0 * y).exp());
            let omt = 1.0 / (1.0 + (2.0 * y).exp());
            let sech = 1.0 / y.cosh();
            let w = FRAC_PI_4 * x.cosh() * sech * sech;
            acc += f(t, omt) * w;
        }
        acc * h
    };
    let mut h = 0.5;
    let mut prev = eval(h);
    for _ in 0..10 {
        h *= 0.5;
        let next = eval(h);
        if (next - prev).norm() <= 1e-11 * next.norm().max(1e-300) {
            return next;
        }
        prev = next;
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;

    const MARGIN: f64 = 1e-3;
    const REL_TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn segment_matches_tanh_sinh() {
        // One movable puncture plus 0 and 1; period over [0, 1].
        let punctures = [c(0.4, 0.7), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.3, 0.5, 0.55];
        let got = segment_period(&punctures, &exponents, 1, 2, MARGIN, REL_TOL).unwrap();

        // Same branch-fixed integrand through an unrelated quadrature.
        let cut = (c(0.5, 0.0) - punctures[0]).arg() + PI;
        let d = punctures[2] - punctures[1];
        let prefactor =
            d * d.powf(-exponents[1]) * (punctures[1] - punctures[2]).powf(-exponents[2]);
        let oracle = prefactor
            * tanh_sinh(|t, omt| {
                Complex64::new(t.powf(-0.5) * omt.powf(-0.55), 0.0)
                    * pow_cut(c(t, 0.0) - punctures[0], exponents[0], cut)
            });
        let rel = (got.value - oracle).norm() / oracle.norm();
        assert!(rel < 1e-9, "relative deviation {rel:.3e}");
        assert!(got.error_estimate < 1e-10 * oracle.norm());
    }

    #[test]
    fn zero_exponents_reduce_to_segment_length() {
        let punctures = [c(0.0, 2.0), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.0, 0.0, 0.0];
        let got = segment_period(&punctures, &exponents, 1, 2, MARGIN, REL_TOL).unwrap();
        assert!((got.value - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn real_configuration_has_fixed_phase() {
        // All punctures real: the integrand on [0, 1] is positive real except
        // for the endpoint convention (t - 1)^{-mu} = (-1)^{-mu} (1-t)^{-mu},
        // so the period is e^{-i pi mu_j} times a positive number.
        let punctures = [c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.3, 0.5, 0.55];
        let got = segment_period(&punctures, &exponents, 1, 2, MARGIN, REL_TOL).unwrap();
        let unphased = got.value * Complex64::from_polar(1.0, PI * exponents[2]);
        let oracle = tanh_sinh(|t, omt| {
            c(t.powf(-0.5) * omt.powf(-0.55) * (t + 3.0).powf(-0.3), 0.0)
        });
        assert!(unphased.re > 0.0);
        assert!((unphased.im / unphased.re).abs() < 1e-12);
        assert!((unphased - oracle).norm() / oracle.norm() < 1e-9);
    }

    #[test]
    fn five_point_segment_matches_tanh_sinh() {
        // Two movable punctures (five weights including infinity).
        let punctures = [c(0.3, 0.8), c(-0.5, 0.6), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.3, 0.35, 0.4, 0.45];
        let got = segment_period(&punctures, &exponents, 2, 3, MARGIN, REL_TOL).unwrap();

        let mid = c(0.5, 0.0);
        let cuts = [
            (punctures[0], exponents[0], (mid - punctures[0]).arg() + PI),
            (punctures[1], exponents[1], (mid - punctures[1]).arg() + PI),
        ];
        let d = punctures[3] - punctures[2];
        let prefactor =
            d * d.powf(-exponents[2]) * (punctures[2] - punctures[3]).powf(-exponents[3]);
        let oracle = prefactor
            * tanh_sinh(|t, omt| {
                cuts.iter()
                    .fold(c(t.powf(-0.4) * omt.powf(-0.45), 0.0), |acc, &(pl, ml, cut)| {
                        acc * pow_cut(c(t, 0.0) - pl, ml, cut)
                    })
            });
        assert!((got.value - oracle).norm() / oracle.norm() < 1e-9);
    }

    #[test]
    fn puncture_near_segment_is_rejected() {
        let punctures = [c(0.5, 1e-6), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.3, 0.5, 0.55];
        let err = segment_period(&punctures, &exponents, 1, 2, MARGIN, REL_TOL).unwrap_err();
        assert!(matches!(
            err,
            PeriodError::PunctureOnSegment { index: 0, .. }
        ));
    }

    #[test]
    fn puncture_barely_off_segment_fails_ladder() {
        // Inside the admissible region but so close to the path that no
        // ladder order can resolve the near-singularity.
        let punctures = [c(0.5, 2e-3), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.3, 0.5, 0.55];
        let err = segment_period(&punctures, &exponents, 1, 2, 1e-3, REL_TOL).unwrap_err();
        assert!(matches!(err, PeriodError::ToleranceNotMet { .. }));
    }

    #[test]
    fn real_ray_matches_tanh_sinh() {
        // Ray from the puncture at 1 along the positive real axis: the
        // integrand stays positive real, and with w = -1 for the puncture at
        // 0 the factor u - w (1 - u) collapses to 1.
        let punctures = [c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.3, 0.5, 0.55];
        let got = ray_period(&punctures, &exponents, 2, 0.0, MARGIN, REL_TOL).unwrap();
        let oracle = tanh_sinh(|u, omu| {
            c(u.powf(-0.55) * omu.powf(-0.65) * (4.0 - 3.0 * u).powf(-0.3), 0.0)
        });
        assert!((got.value.im / got.value.re).abs() < 1e-12);
        assert!((got.value - oracle).norm() / oracle.norm() < 1e-9);
    }

    #[test]
    fn ray_value_is_independent_of_direction() {
        // Small rotations of the ray sweep across no puncture, so the
        // branch-continued period cannot change.
        let punctures = [c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.3, 0.5, 0.55];
        let plus = ray_period(&punctures, &exponents, 2, 0.15, MARGIN, REL_TOL).unwrap();
        let minus = ray_period(&punctures, &exponents, 2, -0.15, MARGIN, REL_TOL).unwrap();
        let rel = (plus.value - minus.value).norm() / plus.value.norm();
        assert!(rel < 1e-10, "relative deviation {rel:.3e}");
    }

    #[test]
    fn ray_requires_integrable_infinity() {
        let punctures = [c(0.4, 0.7), c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.2, 0.3, 0.4];
        let err = ray_period(&punctures, &exponents, 0, 0.5, MARGIN, REL_TOL).unwrap_err();
        assert!(matches!(
            err,
            PeriodError::NonIntegrable { index: 3, .. }
        ));
    }

    #[test]
    fn puncture_on_ray_is_rejected() {
        let punctures = [c(0.0, 0.0), c(1.0, 0.0)];
        let exponents = [0.55, 0.65];
        let err = ray_period(&punctures, &exponents, 0, 0.0, MARGIN, REL_TOL).unwrap_err();
        assert!(matches!(
            err,
            PeriodError::PunctureOnSegment { index: 1, .. }
        ));
    }
}
