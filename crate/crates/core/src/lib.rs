//! Exact and numerical geometry of moduli of weighted point configurations on
//! the projective line.
//!
//! The exact layer (rational arithmetic throughout) covers Deligne-Mostow
//! weight systems and their GIT stability, the collision stratification of the
//! compactified moduli space with tangent-cone volume densities, Calabi-ansatz
//! log Fano cone densities, and log Chern/Bogomolov-Miyaoka-Yau intersection
//! numbers of weighted hyperplane arrangements.  The numerical layer verifies
//! curvature identities of model Kaehler metrics by high-order finite
//! differences and evaluates hypergeometric period integrals, Weil-Petersson
//! areas, and the Schwarz-Christoffel developing map with singularity-absorbing
//! Gauss-Jacobi quadrature.

pub mod bmy;
pub mod checks;
pub mod density;
pub mod metrics;
pub mod periods;
pub mod rational;
pub mod strata;
pub mod weights;
