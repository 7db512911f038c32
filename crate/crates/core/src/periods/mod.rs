//! Hypergeometric period integrals and the Weil-Petersson potential on the
//! moduli of four or five weighted points on the line.
//!
//! The differential is Omega_z = prod_j (t - z_j)^{-mu_j} t^{-mu_{n+1}}
//! (t - 1)^{-mu_{n+2}} dt with exponents from a weight system (sum 2, each in
//! (0,1)); the weight at infinity is implied by the finite ones.  Periods
//! along straight segments and rays absorb the endpoint singularities into
//! Gauss-Jacobi rules; branches are fixed per factor by a cut pointing away
//! from the path and asserted continuous by sampling.  The area
//! integral(i Omega wedge conj Omega) is computed two independent ways: a 2D
//! quadrature oracle (polar Voronoi cells around the punctures plus a tail in
//! 1/t) and a fitted hermitian combination of two periods; the two must
//! agree, which pins the Weil-Petersson potential -log(area) used for the
//! curvature constancy check.  Constant rescalings of Omega shift the
//! potential by an additive constant and drop out of every curvature.

mod area;
mod config;
mod contour;
mod jacobi;
mod sc;

pub use area::{
    area_oracle, wp_area, wp_curvature_check, CrossCheckRow, WpCurvatureReport, WpEvaluator,
    WpMethod, WpValue,
};
pub use config::{ConfigurationPoint, DEFAULT_MARGIN};
pub use contour::PeriodValue;
pub use jacobi::{gauss_jacobi, JacobiRule};
pub use sc::{sc_map, sc_side_lengths, sc_vertex_at_infinity};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PeriodError {
    #[error("Jacobi exponents must be finite and > -1, got a = {a}, b = {b}")]
    ExponentOutOfRange { a: f64, b: f64 },
    #[error(
        "puncture {index} lies on the integration path (distance {distance:.3e} < margin {margin:.3e})"
    )]
    PunctureOnSegment {
        index: usize,
        distance: f64,
        margin: f64,
    },
    #[error("exponent {exponent} at puncture {index} gives a non-integrable density")]
    NonIntegrable { index: usize, exponent: f64 },
    #[error("{context}: achieved {achieved:.3e}, required {required:.3e}")]
    ToleranceNotMet {
        context: String,
        achieved: f64,
        required: f64,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
}
