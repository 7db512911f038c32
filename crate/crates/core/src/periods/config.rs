//! A point of the weighted configuration space: n movable punctures plus the
//! normalized ones at 0 and 1, with the last weight placed at infinity.
//!
//! Exponents are the weights themselves: the period differential is
//! prod (t - p_l)^{-mu_l} dt over the finite punctures, and the behaviour at
//! infinity is governed by the effective exponent 2 - sum(finite), which
//! coincides with the nominal last weight when the weights sum to 2.  All
//! quadrature-facing data is f64; exactness lives in the combinatorial layer.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::weights::WeightSystem;

use super::contour::{self, PeriodValue};
use super::PeriodError;

/// Default minimal distance between punctures, and from a puncture to an
/// integration path that does not end on it.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Weighted punctures [z_1 .. z_n, 0, 1] with exponents for each and for
/// the point at infinity.
#[derive(Debug, Clone)]
pub struct ConfigurationPoint {
    /// Nominal exponents, one per finite puncture plus one for infinity.
    mu: Vec<f64>,
    punctures: Vec<Complex64>,
    margin: f64,
}

impl ConfigurationPoint {
    /// Places `coords` as the movable punctures of `weights`; the weight
    /// count must be the puncture count plus three (0, 1 and infinity).
    pub fn new(weights: &WeightSystem, coords: &[Complex64]) -> Result<Self, PeriodError> {
        Self::with_margin(weights, coords, DEFAULT_MARGIN)
    }

    /// Same as `new` with an explicit separation margin.
    pub fn with_margin(
        weights: &WeightSystem,
        coords: &[Complex64],
        margin: f64,
    ) -> Result<Self, PeriodError> {
        let mu: Vec<f64> = weights.weights().iter().map(|w| w.to_f64()).collect();
        if coords.len() + 3 != mu.len() {
            return Err(PeriodError::InvalidConfiguration(format!(
                "{} weights call for {} movable punctures, got {}",
                mu.len(),
                mu.len() - 3,
                coords.len()
            )));
        }
        if !(1..=2).contains(&coords.len()) {
            return Err(PeriodError::InvalidConfiguration(
                "period computations support one or two movable punctures".to_string(),
            ));
        }
        let mut punctures = coords.to_vec();
        punctures.push(Complex64::new(0.0, 0.0));
        punctures.push(Complex64::new(1.0, 0.0));
        Self::from_parts(mu, punctures, margin)
    }

    /// Builds directly from finite exponents, bypassing weight validation;
    /// the nominal infinity exponent is set to 2 - sum.  Diagnostics and
    /// tests only.
    pub(crate) fn from_exponents(
        finite: Vec<f64>,
        punctures: Vec<Complex64>,
        margin: f64,
    ) -> Result<Self, PeriodError> {
        assert_eq!(finite.len(), punctures.len());
        let sigma: f64 = finite.iter().sum();
        let mut mu = finite;
        mu.push(2.0 - sigma);
        Self::from_parts(mu, punctures, margin)
    }

    fn from_parts(
        mu: Vec<f64>,
        punctures: Vec<Complex64>,
        margin: f64,
    ) -> Result<Self, PeriodError> {
        if !(margin.is_finite() && margin > 0.0) {
            return Err(PeriodError::InvalidConfiguration(format!(
                "margin must be positive and finite, got {margin}"
            )));
        }
        for (l, m) in mu[..mu.len() - 1].iter().enumerate() {
            if !m.is_finite() || *m < 0.0 || *m >= 1.0 {
                return Err(PeriodError::InvalidConfiguration(format!(
                    "exponent {m} at puncture {l} is outside [0, 1)"
                )));
            }
        }
        for i in 0..punctures.len() {
            for j in i + 1..punctures.len() {
                let dist = (punctures[i] - punctures[j]).norm();
                if dist < margin {
                    return Err(PeriodError::InvalidConfiguration(format!(
                        "punctures {i} and {j} are {dist:.3e} apart, below the margin {margin:.3e}"
                    )));
                }
            }
        }
        Ok(ConfigurationPoint {
            mu,
            punctures,
            margin,
        })
    }

    /// Replaces the exponent of one finite puncture, keeping the punctures
    /// fixed; the nominal infinity exponent is recomputed as 2 - sum so the
    /// stored vector stays consistent.  Diagnostic tool for probing how the
    /// period geometry reacts to a wrong weight.
    pub fn with_exponent_override(mut self, index: usize, value: f64) -> Result<Self, PeriodError> {
        let finite = self.mu.len() - 1;
        if index >= finite {
            return Err(PeriodError::InvalidConfiguration(format!(
                "exponent index {index} out of range for {finite} finite punctures"
            )));
        }
        if !value.is_finite() || !(0.0..1.0).contains(&value) {
            return Err(PeriodError::InvalidConfiguration(format!(
                "override exponent {value} is outside [0, 1)"
            )));
        }
        self.mu[index] = value;
        let sigma: f64 = self.mu[..finite].iter().sum();
        self.mu[finite] = 2.0 - sigma;
        Ok(self)
    }

    /// Number of movable punctures.
    pub fn n(&self) -> usize {
        self.punctures.len() - 2
    }

    /// All nominal exponents, infinity last.
    pub fn exponents(&self) -> &[f64] {
        &self.mu
    }

    /// Exponents of the finite punctures, aligned with `punctures()`.
    pub fn finite_exponents(&self) -> &[f64] {
        &self.mu[..self.mu.len() - 1]
    }

    /// Sum of the finite exponents.
    pub fn sum_finite(&self) -> f64 {
        self.finite_exponents().iter().sum()
    }

    /// Exponent governing decay at infinity, 2 - sum(finite).
    pub fn effective_infinity_exponent(&self) -> f64 {
        2.0 - self.sum_finite()
    }

    /// Finite punctures [z_1 .. z_n, 0, 1].
    pub fn punctures(&self) -> &[Complex64] {
        &self.punctures
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    fn check_index(&self, i: usize) -> Result<(), PeriodError> {
        if i >= self.punctures.len() {
            return Err(PeriodError::InvalidConfiguration(format!(
                "puncture index {i} out of range for {} punctures",
                self.punctures.len()
            )));
        }
        Ok(())
    }

    /// Period along the straight segment from puncture i to puncture j.
    pub fn period(&self, i: usize, j: usize, rel_tol: f64) -> Result<PeriodValue, PeriodError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(PeriodError::InvalidConfiguration(
                "segment endpoints must be distinct punctures".to_string(),
            ));
        }
        contour::segment_period(
            &self.punctures,
            self.finite_exponents(),
            i,
            j,
            self.margin,
            rel_tol,
        )
    }

    /// Period from puncture i to infinity along the outward direction away
    /// from the centroid of the other punctures (straight up if degenerate).
    pub fn ray_period(&self, i: usize, rel_tol: f64) -> Result<PeriodValue, PeriodError> {
        self.check_index(i)?;
        self.ray_period_in_direction(i, self.outward_direction(i), rel_tol)
    }

    /// Period from puncture i to infinity along e^{i theta}.
    pub fn ray_period_in_direction(
        &self,
        i: usize,
        theta: f64,
        rel_tol: f64,
    ) -> Result<PeriodValue, PeriodError> {
        self.check_index(i)?;
        contour::ray_period(
            &self.punctures,
            self.finite_exponents(),
            i,
            theta,
            self.margin,
            rel_tol,
        )
    }

    /// Direction of the ray used by `ray_period`.
    pub fn outward_direction(&self, i: usize) -> f64 {
        let p = self.punctures[i];
        let rest = self.punctures.len() - 1;
        let centroid = self
            .punctures
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != i)
            .map(|(_, &q)| q)
            .sum::<Complex64>()
            / rest as f64;
        let dir = p - centroid;
        if dir.norm() < 1e-12 {
            FRAC_PI_2
        } else {
            dir.arg()
        }
    }
}
