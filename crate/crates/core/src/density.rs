//! Calabi-ansatz cone exponents and exact volume densities for log Fano cones.
//!
//! The input data describe a Fano base X of complex dimension n and Fano index
//! I, polarized by the m-th root of the anticanonical bundle, together with
//! boundary divisors D_j of degree d_j carrying cone angles 2*pi*beta_j.  The
//! Calabi ansatz equips the blow-down of the total space of the dual
//! polarization with a Kaehler cone metric whose radial exponent is
//!
//!   gamma = (I + sum_j d_j (beta_j - 1)) / (m (n + 1)),
//!
//! positive exactly when the log pair is klt, and whose volume density (the
//! ratio of the link volume to the volume of the round unit sphere) is
//!
//!   nu = (I/m) * ((I + sum_j d_j (beta_j - 1)) / I)^(n+1)
//!        * c1(X)^n / (n+1)^(n+1).
//!
//! Both quantities are rational functions of the input and are evaluated
//! exactly.  The intersection number c1(X)^n is supplied by the caller; the
//! only preset provided is CP^d with hyperplane divisors, where c1^d =
//! (d+1)^d.  For a collision block B of a weighted point configuration the
//! relevant cone is CP^(|B|-2) with the pair divisors beta_ij = 1 - mu_i -
//! mu_j, and its density must reproduce the stratification product factor
//! (1 - s_B)^(|B|-1); `crosscheck_stratum_density` verifies that identity
//! through two independent code paths.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;
use crate::strata::{tangent_cone, Partition, StratumError};
use crate::weights::WeightSystem;

/// Errors from cone data construction and density evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    /// The log pair is not klt: the cone exponent came out non-positive.
    #[error("pair is not klt: gamma = {gamma} is not positive")]
    NotKlt { gamma: Rational },
    /// Structurally invalid cone data.
    #[error("invalid cone data: {0}")]
    InvalidData(String),
}

/// One boundary divisor of the base: degree `d_j` (in multiples of the
/// polarization class) and cone angle `2*pi*beta_j` with beta in (0, 1].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDivisor {
    pub degree: u32,
    pub beta: Rational,
}

/// Log Fano cone data: base dimension, Fano index, polarization multiple,
/// weighted boundary divisors, and the intersection number c1(X)^n.
///
/// Construction validates everything except the klt condition, which is
/// checked when `gamma` or `volume_density` is evaluated (a non-klt pair is
/// valid data whose evaluation fails with `NotKlt`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConeData")]
pub struct LogFanoConeData {
    n: usize,
    #[serde(rename = "I")]
    fano_index: u32,
    m: u32,
    divisors: Vec<ConeDivisor>,
    c1n: Rational,
}

/// Wire format mirror of `LogFanoConeData`; deserialization funnels through
/// `LogFanoConeData::new` so invalid JSON cannot bypass validation.
#[derive(Deserialize)]
struct RawConeData {
    n: usize,
    #[serde(rename = "I")]
    fano_index: u32,
    m: u32,
    divisors: Vec<ConeDivisor>,
    c1n: Rational,
}

impl TryFrom<RawConeData> for LogFanoConeData {
    type Error = DensityError;

    fn try_from(raw: RawConeData) -> Result<Self, DensityError> {
        LogFanoConeData::new(raw.n, raw.fano_index, raw.m, raw.divisors, raw.c1n)
    }
}

/// The exact cone exponent and volume density of a log Fano cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityValue {
    pub gamma: Rational,
    pub nu: Rational,
}

impl LogFanoConeData {
    pub fn new(
        n: usize,
        fano_index: u32,
        m: u32,
        divisors: Vec<ConeDivisor>,
        c1n: Rational,
    ) -> Result<Self, DensityError> {
        if fano_index == 0 {
            return Err(DensityError::InvalidData(
                "Fano index must be at least 1".into(),
            ));
        }
        if m == 0 {
            return Err(DensityError::InvalidData(
                "polarization multiple must be at least 1".into(),
            ));
        }
        if !c1n.is_positive() {
            return Err(DensityError::InvalidData(format!(
                "c1^n must be positive, got {c1n}"
            )));
        }
        for (j, div) in divisors.iter().enumerate() {
            if div.degree == 0 {
                return Err(DensityError::InvalidData(format!(
                    "divisor {} has degree 0",
                    j + 1
                )));
            }
            if !div.beta.is_positive() || div.beta > Rational::one() {
                return Err(DensityError::InvalidData(format!(
                    "divisor {} has angle {} outside (0, 1]",
                    j + 1,
                    div.beta
                )));
            }
        }
        Ok(LogFanoConeData {
            n,
            fano_index,
            m,
            divisors,
            c1n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fano_index(&self) -> u32 {
        self.fano_index
    }

    pub fn polarization_multiple(&self) -> u32 {
        self.m
    }

    pub fn divisors(&self) -> &[ConeDivisor] {
        &self.divisors
    }

    pub fn c1n(&self) -> &Rational {
        &self.c1n
    }

    /// Degree of the log anticanonical class: I + sum_j d_j (beta_j - 1).
    fn log_anticanonical_degree(&self) -> Rational {
        let mut total = Rational::from_int(i64::from(self.fano_index));
        for div in &self.divisors {
            total = total + Rational::from_int(i64::from(div.degree)) * (&div.beta - Rational::one());
        }
        total
    }

    /// The radial exponent gamma = (I + sum_j d_j (beta_j - 1)) / (m (n + 1)).
    pub fn gamma(&self) -> Result<Rational, DensityError> {
        let denom = Rational::from_int(i64::from(self.m) * (self.n as i64 + 1));
        let gamma = self.log_anticanonical_degree() / denom;
        if gamma.is_positive() {
            Ok(gamma)
        } else {
            Err(DensityError::NotKlt { gamma })
        }
    }

    /// The exact volume density
    /// nu = (I/m) ((I + sum d_j (beta_j - 1)) / I)^(n+1) c1^n / (n+1)^(n+1).
    pub fn volume_density(&self) -> Result<DensityValue, DensityError> {
        let gamma = self.gamma()?;
        let index = Rational::from_int(i64::from(self.fano_index));
        let np1 = self.n as i32 + 1;
        let nu = (&index / Rational::from_int(i64::from(self.m)))
            * (self.log_anticanonical_degree() / &index).pow(np1)
            * &self.c1n
            / Rational::from_int(self.n as i64 + 1).pow(np1);
        Ok(DensityValue { gamma, nu })
    }
}

/// Cone data for CP^d carrying the pair-collision hyperplanes of a
/// Deligne-Mostow weight family: one hyperplane per index pair {i, j} with
/// angle beta_ij = 1 - mu_i - mu_j.  Requires d + 2 weights in (0, 1) with sum
/// S < 1; the resulting volume density is (1 - S)^(d+1).
pub fn cp_dm_preset(d: usize, mu: &[Rational]) -> Result<LogFanoConeData, DensityError> {
    if mu.len() != d + 2 {
        return Err(DensityError::InvalidData(format!(
            "CP^{} preset needs {} weights, got {}",
            d,
            d + 2,
            mu.len()
        )));
    }
    for (k, m) in mu.iter().enumerate() {
        if !m.is_positive() || *m >= Rational::one() {
            return Err(DensityError::InvalidData(format!(
                "weight {} = {} outside (0, 1)",
                k + 1,
                m
            )));
        }
    }
    let sum: Rational = mu.iter().sum();
    if sum >= Rational::one() {
        return Err(DensityError::InvalidData(format!(
            "weight sum {sum} must be < 1 for a stable collision"
        )));
    }
    let mut divisors = Vec::new();
    for i in 0..mu.len() {
        for j in (i + 1)..mu.len() {
            divisors.push(ConeDivisor {
                degree: 1,
                beta: Rational::one() - &mu[i] - &mu[j],
            });
        }
    }
    let c1n = Rational::from_int(d as i64 + 1).pow(d as i32);
    LogFanoConeData::new(d, (d + 1) as u32, 1, divisors, c1n)
}

/// Check that the stratification product density of a stable partition equals
/// the product over its blocks of CP^(|B|-2) cone volume densities, computed
/// through the generic `volume_density` path.  Exact rational comparison.
pub fn crosscheck_stratum_density(w: &WeightSystem, p: &Partition) -> Result<bool, StratumError> {
    let cone = tangent_cone(w, p)?;
    let mut product = Rational::one();
    for block in p.blocks() {
        if block.len() < 2 {
            continue;
        }
        let mu: Vec<Rational> = block.iter().map(|&i| w.mu(i).clone()).collect();
        // A stable block has all weights in (0, 1) and sum < 1, so the CP^(b-2)
        // preset and its density are always defined here.
        let data = cp_dm_preset(block.len() - 2, &mu)
            .expect("stable block yields valid cone data");
        let density = data
            .volume_density()
            .expect("stable block cone is klt");
        product = product * density.nu;
    }
    Ok(product == cone.total_density)
}
