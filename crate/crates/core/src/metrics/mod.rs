//! Finite-difference laboratory for model Kaehler metrics.
//!
//! A catalog of model potentials (flat, conical, cusp, Calabi-type cones and
//! their lambda modifications) is differentiated numerically to check the
//! curvature identities the exact layer relies on: Einstein equations
//! Ric = c g, the cone Ricci lemma, volume-form ratios of the lambda
//! modification, constant Gauss curvature of the one-dimensional conical
//! models, and the cone-to-cusp potential degeneration.  Everything is
//! plain f64; each check carries an explicit tolerance and reports residual
//! statistics rather than a bare boolean.

pub(crate) mod fd;
mod models;
mod verify;

pub use models::{BaseMetric, PotentialModel};
pub use verify::{
    annulus_samples, band_samples_2d, gauss_curvature_1d, metric_at, ricci_at,
    verify_cone_ricci, verify_cone_to_cusp, verify_einstein, verify_lambda_modification,
    ConeRicciReport, ConeToCuspReport, ConeToCuspRow, CurvatureReport, LambdaReport, MetricError,
    MetricValue, RicciValue, CONVENTION,
};

/// Representative catalog entries with default parameters, for listings.
pub fn catalog() -> Vec<PotentialModel> {
    vec![
        PotentialModel::flat(2),
        PotentialModel::fs_conical(0.5),
        PotentialModel::hyperbolic_conical(0.5),
        PotentialModel::flat_conical(0.5),
        PotentialModel::cusp_1d(),
        PotentialModel::cusp_2d(),
        PotentialModel::cone(BaseMetric::FubiniStudyDoubled, 0.5),
        PotentialModel::cone(BaseMetric::ConicalFubiniStudy { beta: 0.5 }, 1.0),
        PotentialModel::conical_plane(0.5),
        PotentialModel::lambda_modified(PotentialModel::flat(2), 1.0),
        PotentialModel::lambda_modified(PotentialModel::flat(2), -1.0),
        PotentialModel::lambda_modified(PotentialModel::conical_plane(0.5), -1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_metrics_are_positive_definite_on_admissible_samples() {
        // Every catalog model admits a sample point where the metric is
        // Hermitian positive definite with the default step.
        for model in catalog() {
            let sample: Vec<num_complex::Complex64> = match model.dim() {
                1 => annulus_samples(0.3, 0.5, 1).remove(0),
                2 => band_samples_2d((0.3, 0.5), (0.35, 0.55), 1).remove(0),
                other => panic!("unexpected dimension {other}"),
            };
            let g = metric_at(&model, &sample, None)
                .unwrap_or_else(|e| panic!("{}: {e}", model.name()));
            assert!(g.eig_min > 0.0, "{} not positive definite", model.name());
            for a in 0..model.dim() {
                for b in 0..model.dim() {
                    let diff = (g.matrix[(a, b)] - g.matrix[(b, a)].conj()).norm();
                    assert!(diff == 0.0, "{} not Hermitian", model.name());
                }
            }
        }
    }
}
