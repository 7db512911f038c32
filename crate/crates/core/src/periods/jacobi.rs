//! Gauss-Jacobi quadrature on [0, 1] for the weight t^a (1 - t)^b.
//!
//! Nodes and weights come from the Golub-Welsch eigenvalue method: the
//! three-term recurrence of the Jacobi polynomials gives a symmetric
//! tridiagonal matrix whose eigenvalues are the nodes and whose first
//! eigenvector components give the weights, scaled by the total mass
//! B(a+1, b+1).  An n-point rule integrates t^a (1-t)^b p(t) exactly for
//! polynomials p up to degree 2n-1; every constructed rule is validated
//! against the monomial moments, which satisfy the closed recursion
//! m_k = m_{k-1} (a + k) / (a + b + k + 1) starting from m_0 = B(a+1, b+1).

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;
use std::ops::{AddAssign, Mul};

use num_traits::Zero;

use super::PeriodError;

/// Relative accuracy demanded of every monomial moment up to degree
/// 2 * order - 1.  Golub-Welsch is backward stable, so failures indicate a
/// bad recurrence coefficient rather than roundoff.
const MOMENT_REL_TOL: f64 = 1e-12;

/// Quadrature rule approximating integral_0^1 t^a (1-t)^b f(t) dt as
/// sum_i weights[i] * f(nodes[i]).
#[derive(Debug, Clone)]
pub struct JacobiRule {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    /// Exponent on t at the left endpoint.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Exponent on 1 - t at the right endpoint.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in (0, 1), ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive weights matching `nodes`; they sum to B(a+1, b+1).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to the smooth factor `f`; the singular weight
    /// t^a (1-t)^b is already folded into the quadrature weights.
    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        T: Zero + AddAssign + Mul<f64, Output = T>,
        F: FnMut(f64) -> T,
    {
        let mut acc = T::zero();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(t) * w;
        }
        acc
    }
}

/// log B(x, y) for positive arguments.
fn ln_beta(x: f64, y: f64) -> f64 {
    ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)
}

/// Builds the `order`-point Gauss-Jacobi rule for weight t^a (1-t)^b on
/// [0, 1].  Requires a > -1 and b > -1 (integrability at the endpoints).
pub fn gauss_jacobi(a: f64, b: f64, order: usize) -> Result<JacobiRule, PeriodError> {
    if !(a.is_finite() && b.is_finite()) || a <= -1.0 || b <= -1.0 {
        return Err(PeriodError::ExponentOutOfRange { a, b });
    }
    assert!(order >= 1, "quadrature order must be at least 1");

    // Standard Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1]; the map
    // x = 2t - 1 sends t^a to (1+x)^beta with beta = a, and (1-t)^b to
    // (1-x)^alpha with alpha = b.
    let alpha = b;
    let beta = a;
    let ab = alpha + beta;

    let mut diag = vec![0.0; order];
    let mut off = vec![0.0; order.saturating_sub(1)];
    diag[0] = (beta - alpha) / (ab + 2.0);
    for k in 1..order {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        diag[k] = (beta * beta - alpha * alpha) / denom;
        let e2 = if k == 1 {
            4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                / ((2.0 * kf + ab) * (2.0 * kf + ab) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
        };
        off[k - 1] = e2.sqrt();
    }

    let mut jac = DMatrix::<f64>::zeros(order, order);
    for i in 0..order {
        jac[(i, i)] = diag[i];
        if i + 1 < order {
            jac[(i, i + 1)] = off[i];
            jac[(i + 1, i)] = off[i];
        }
    }
    let eigen = SymmetricEigen::new(jac);

    let mass = ln_beta(a + 1.0, b + 1.0).exp();
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let x = eigen.eigenvalues[i];
            let v0 = eigen.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("eigenvalues are finite"));

    let rule = JacobiRule {
        a,
        b,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    };
    validate_moments(&rule)?;
    Ok(rule)
}

/// Checks every monomial moment the rule must reproduce exactly.
fn validate_moments(rule: &JacobiRule) -> Result<(), PeriodError> {
    let mut expected = ln_beta(rule.a + 1.0, rule.b + 1.0).exp();
    let mut worst = 0.0_f64;
    for k in 0..2 * rule.order() {
        if k > 0 {
            // integral t^k t^a (1-t)^b dt = B(a+k+1, b+1).
            expected *= (rule.a + k as f64) / (rule.a + rule.b + k as f64 + 1.0);
        }
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| w * t.powi(k as i32))
            .sum();
        worst = worst.max((got - expected).abs() / expected.abs());
    }
    if worst > MOMENT_REL_TOL {
        return Err(PeriodError::ToleranceNotMet {
            context: format!(
                "moment validation of {}-point Jacobi rule (a = {}, b = {})",
                rule.order(),
                rule.a,
                rule.b
            ),
            achieved: worst,
            required: MOMENT_REL_TOL,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// Gamma(1/3)^2 / Gamma(2/3) = B(1/3, 1/3), the full beta mass for the
    /// exponent pair (-2/3, -2/3).
    const BETA_THIRD_THIRD: f64 = 5.299_916_250_856_349_5;

    #[test]
    fn legendre_special_case() {
        // a = b = 0 reduces to Gauss-Legendre on [0, 1]; an 8-point rule
        // integrates sin(pi t) to full precision.
        let rule = gauss_jacobi(0.0, 0.0, 8).unwrap();
        let integral: f64 = rule.integrate(|t| (std::f64::consts::PI * t).sin());
        assert!((integral - 2.0 / std::f64::consts::PI).abs() < 1e-13);
        let weight_sum: f64 = rule.weights().iter().sum();
        assert!((weight_sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn square_root_endpoint() {
        // integral_0^1 t^{-1/2} dt = 2 with the singular factor in the weight.
        let rule = gauss_jacobi(-0.5, 0.0, 8).unwrap();
        let integral: f64 = rule.integrate(|_| 1.0);
        assert!((integral - 2.0).abs() < 1e-13);
    }

    #[test]
    fn beta_one_third_both_endpoints() {
        let rule = gauss_jacobi(-2.0 / 3.0, -2.0 / 3.0, 16).unwrap();
        let integral: f64 = rule.integrate(|_| 1.0);
        let rel = (integral - BETA_THIRD_THIRD).abs() / BETA_THIRD_THIRD;
        assert!(rel < 1e-10, "relative error {rel:.3e}");
    }

    #[test]
    fn nodes_sorted_inside_interval_weights_positive() {
        let rule = gauss_jacobi(-0.9, 0.7, 24).unwrap();
        for pair in rule.nodes().windows(2) {
            assert!(pair[0] < pair[1]);
        }
        assert!(rule.nodes()[0] > 0.0 && *rule.nodes().last().unwrap() < 1.0);
        assert!(rule.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn complex_integrand() {
        // integral_0^1 t^{-1/2} e^{i pi t} dt via a complex-valued smooth part.
        let rule = gauss_jacobi(-0.5, 0.0, 32).unwrap();
        let got: Complex64 =
            rule.integrate(|t| Complex64::new(0.0, std::f64::consts::PI * t).exp());
        // Oracle: split into real and imaginary parts and integrate each with
        // a dense Legendre rule after substituting t = s^2 (smooth integrand).
        let legendre = gauss_jacobi(0.0, 0.0, 64).unwrap();
        let oracle: Complex64 = legendre.integrate(|s| {
            let t = s * s;
            Complex64::new(0.0, std::f64::consts::PI * t).exp() * 2.0
        });
        assert!((got - oracle).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_integrable_exponents() {
        assert!(matches!(
            gauss_jacobi(-1.0, 0.0, 8),
            Err(PeriodError::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            gauss_jacobi(0.0, -1.5, 8),
            Err(PeriodError::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            gauss_jacobi(f64::NAN, 0.0, 8),
            Err(PeriodError::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn high_order_moments_stay_valid() {
        // The largest order used by the period ladder.
        for &(a, b) in &[(-0.55, -0.65), (-2.0 / 3.0, 0.0), (0.3, -0.99)] {
            gauss_jacobi(a, b, 96).unwrap();
        }
    }
}
