//! Catalog of model Kaehler potentials.
//!
//! Each model carries its evaluator, complex dimension, and a lower bound on
//! the distance to its singular locus.  The distance bound is what the
//! finite-difference layer budgets its steps against, so it must be safe: all
//! probe points within the bound stay in the region where the evaluator is
//! finite and smooth.  Exact distances are used where available (circles,
//! punctures); sublevel-set boundaries like -log|w|^2 - |z|^2 = 0 use a
//! gradient-capped bound u / L that only underestimates.

use num_complex::Complex64;

/// Base metrics for the Calabi cone ansatz on the total space over CP^1,
/// expressed through the fiber weight H(z): rho^2 = |w|^2 H(z) and
/// omega_base = i ddbar log H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseMetric {
    /// H = (1 + |z|^2)^2, i.e. omega = 2 omega_FS with Ric(omega) = omega.
    FubiniStudyDoubled,
    /// H = 1 + |z|^{2 beta}, the conical Fubini-Study model with
    /// Ric(omega) = 2 omega away from z = 0.
    ConicalFubiniStudy { beta: f64 },
}

impl BaseMetric {
    pub(crate) fn h(&self, z: Complex64) -> f64 {
        match self {
            BaseMetric::FubiniStudyDoubled => (1.0 + z.norm_sqr()).powi(2),
            BaseMetric::ConicalFubiniStudy { beta } => 1.0 + z.norm_sqr().powf(*beta),
        }
    }

    /// Metric coefficient g_base = d^2 log H / dz dzbar (closed form).
    pub(crate) fn g_base(&self, z: Complex64) -> f64 {
        match self {
            BaseMetric::FubiniStudyDoubled => 2.0 / (1.0 + z.norm_sqr()).powi(2),
            BaseMetric::ConicalFubiniStudy { beta } => {
                let u = z.norm_sqr().powf(*beta);
                beta * beta * u / (z.norm_sqr() * (1.0 + u).powi(2))
            }
        }
    }

    /// Einstein factor mu with Ric(omega_base) = mu omega_base.
    pub(crate) fn mu(&self) -> f64 {
        match self {
            BaseMetric::FubiniStudyDoubled => 1.0,
            BaseMetric::ConicalFubiniStudy { .. } => 2.0,
        }
    }

    fn is_conical(&self) -> bool {
        matches!(self, BaseMetric::ConicalFubiniStudy { beta } if *beta < 1.0)
    }

    pub(crate) fn describe(&self) -> String {
        match self {
            BaseMetric::FubiniStudyDoubled => "2*FS on CP^1".into(),
            BaseMetric::ConicalFubiniStudy { beta } => {
                format!("conical FS, cone angle 2 pi {beta}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ModelKind {
    /// sum_k weight_k |z_k|^2 (weights may be non-positive for diagnostics).
    FlatWeighted { weights: Vec<f64> },
    /// log(1 + |z|^{2 beta}), N = 1.
    FsConical { beta: f64 },
    /// -log(1 - |z|^{2 beta}), N = 1, on |z| < 1.
    HyperbolicConical { beta: f64 },
    /// |z|^{2 beta}, N = 1.
    FlatConical { beta: f64 },
    /// -log(-log|z|^2), N = 1, on 0 < |z| < 1.
    Cusp1d,
    /// -log(-log|w|^2 - |z|^2), N = 2, coordinates (w, z) with
    /// -log|w|^2 - |z|^2 > 0 and w != 0.
    Cusp2d,
    /// Calabi ansatz r^2 = (|w|^2 H(z))^gamma, N = 2, coordinates (z, w).
    Cone { base: BaseMetric, gamma: f64 },
    /// |z_1|^{2 beta} + |z_2|^2, N = 2 (a flat conical r^2 model).
    ConicalPlane { beta: f64 },
    /// lambda log(1 + lambda r^2(z)) over an inner r^2 model; lambda = -1
    /// additionally restricts to {r^2 < 1}.
    LambdaModified {
        inner: Box<PotentialModel>,
        lambda: f64,
    },
}

/// A model potential: name, chart dimension, evaluator, and the singular
/// locus with its distance bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    name: String,
    dim: usize,
    singular_locus: String,
    kind: ModelKind,
}

fn check_beta(beta: f64) {
    assert!(
        beta > 0.0 && beta <= 1.0,
        "cone angle parameter must lie in (0, 1], got {beta}"
    );
}

impl PotentialModel {
    pub fn flat(dim: usize) -> Self {
        PotentialModel::flat_weighted(vec![1.0; dim])
    }

    pub fn flat_weighted(weights: Vec<f64>) -> Self {
        assert!((1..=3).contains(&weights.len()), "dimension must be 1..=3");
        PotentialModel {
            name: "flat-weighted".into(),
            dim: weights.len(),
            singular_locus: "none".into(),
            kind: ModelKind::FlatWeighted { weights },
        }
    }

    pub fn fs_conical(beta: f64) -> Self {
        check_beta(beta);
        PotentialModel {
            name: "fs-conical".into(),
            dim: 1,
            singular_locus: if beta < 1.0 { "z = 0" } else { "none" }.into(),
            kind: ModelKind::FsConical { beta },
        }
    }

    pub fn hyperbolic_conical(beta: f64) -> Self {
        check_beta(beta);
        PotentialModel {
            name: "hyperbolic-conical".into(),
            dim: 1,
            singular_locus: if beta < 1.0 {
                "z = 0 and |z| = 1"
            } else {
                "|z| = 1"
            }
            .into(),
            kind: ModelKind::HyperbolicConical { beta },
        }
    }

    pub fn flat_conical(beta: f64) -> Self {
        check_beta(beta);
        PotentialModel {
            name: "flat-conical".into(),
            dim: 1,
            singular_locus: if beta < 1.0 { "z = 0" } else { "none" }.into(),
            kind: ModelKind::FlatConical { beta },
        }
    }

    pub fn cusp_1d() -> Self {
        PotentialModel {
            name: "cusp-1d".into(),
            dim: 1,
            singular_locus: "z = 0 and |z| = 1".into(),
            kind: ModelKind::Cusp1d,
        }
    }

    pub fn cusp_2d() -> Self {
        PotentialModel {
            name: "cusp-2d".into(),
            dim: 2,
            singular_locus: "w = 0 and -log|w|^2 = |z|^2".into(),
            kind: ModelKind::Cusp2d,
        }
    }

    pub fn cone(base: BaseMetric, gamma: f64) -> Self {
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
        let singular = if base.is_conical() {
            "w = 0 and z = 0"
        } else {
            "w = 0"
        };
        PotentialModel {
            name: match base {
                BaseMetric::FubiniStudyDoubled => "cone-fs2".into(),
                BaseMetric::ConicalFubiniStudy { .. } => "cone-conical-fs".into(),
            },
            dim: 2,
            singular_locus: singular.into(),
            kind: ModelKind::Cone { base, gamma },
        }
    }

    pub fn conical_plane(beta: f64) -> Self {
        check_beta(beta);
        PotentialModel {
            name: "conical-plane".into(),
            dim: 2,
            singular_locus: if beta < 1.0 { "z_1 = 0" } else { "none" }.into(),
            kind: ModelKind::ConicalPlane { beta },
        }
    }

    /// lambda-modification lambda log(1 + lambda r^2) of an r^2 model.
    pub fn lambda_modified(inner: PotentialModel, lambda: f64) -> Self {
        assert!(
            lambda == 1.0 || lambda == -1.0,
            "lambda must be +1 or -1, got {lambda}"
        );
        let singular = if lambda < 0.0 {
            format!("{} and r^2 = 1", inner.singular_locus)
        } else {
            inner.singular_locus.clone()
        };
        PotentialModel {
            name: format!(
                "lambda{}-{}",
                if lambda > 0.0 { "+" } else { "-" },
                inner.name
            ),
            dim: inner.dim,
            singular_locus: singular,
            kind: ModelKind::LambdaModified {
                inner: Box::new(inner),
                lambda,
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn singular_locus(&self) -> &str {
        &self.singular_locus
    }

    /// Potential value; may be non-finite outside the admissible region.
    pub fn evaluate(&self, z: &[Complex64]) -> f64 {
        assert_eq!(z.len(), self.dim, "chart point has wrong dimension");
        match &self.kind {
            ModelKind::FlatWeighted { weights } => z
                .iter()
                .zip(weights)
                .map(|(zk, w)| w * zk.norm_sqr())
                .sum(),
            ModelKind::FsConical { beta } => z[0].norm_sqr().powf(*beta).ln_1p(),
            ModelKind::HyperbolicConical { beta } => -(-z[0].norm_sqr().powf(*beta)).ln_1p(),
            ModelKind::FlatConical { beta } => z[0].norm_sqr().powf(*beta),
            ModelKind::Cusp1d => -(-z[0].norm_sqr().ln()).ln(),
            ModelKind::Cusp2d => {
                let u = -z[0].norm_sqr().ln() - z[1].norm_sqr();
                -u.ln()
            }
            ModelKind::Cone { base, gamma } => {
                (z[1].norm_sqr() * base.h(z[0])).powf(*gamma)
            }
            ModelKind::ConicalPlane { beta } => {
                z[0].norm_sqr().powf(*beta) + z[1].norm_sqr()
            }
            ModelKind::LambdaModified { inner, lambda } => {
                lambda * (lambda * inner.evaluate(z)).ln_1p()
            }
        }
    }

    /// Lower bound on the distance from z to the singular locus, with +inf
    /// for models smooth on the whole chart.  Non-positive values mean the
    /// point is outside the admissible region.
    pub fn singular_distance(&self, z: &[Complex64]) -> f64 {
        assert_eq!(z.len(), self.dim, "chart point has wrong dimension");
        match &self.kind {
            ModelKind::FlatWeighted { .. } => f64::INFINITY,
            ModelKind::FsConical { beta } | ModelKind::FlatConical { beta } => {
                if *beta < 1.0 {
                    z[0].norm()
                } else {
                    f64::INFINITY
                }
            }
            ModelKind::HyperbolicConical { beta } => {
                let rim = 1.0 - z[0].norm();
                if *beta < 1.0 {
                    z[0].norm().min(rim)
                } else {
                    rim
                }
            }
            ModelKind::Cusp1d => z[0].norm().min(1.0 - z[0].norm()),
            ModelKind::Cusp2d => {
                let (w, zz) = (z[0], z[1]);
                let u = -w.norm_sqr().ln() - zz.norm_sqr();
                if u <= 0.0 || w.norm() == 0.0 {
                    return 0.0;
                }
                // Within a step s <= 1, u drops by at most
                // s (2/|w| + 2|z| + 1), so u/(that) is a safe radius.
                let boundary = (u / (2.0 / w.norm() + 2.0 * zz.norm() + 1.0)).min(1.0);
                w.norm().min(boundary)
            }
            ModelKind::Cone { base, .. } => {
                let fiber = z[1].norm();
                if base.is_conical() {
                    fiber.min(z[0].norm())
                } else {
                    fiber
                }
            }
            ModelKind::ConicalPlane { beta } => {
                if *beta < 1.0 {
                    z[0].norm()
                } else {
                    f64::INFINITY
                }
            }
            ModelKind::LambdaModified { inner, lambda } => {
                let base = inner.singular_distance(z);
                if *lambda > 0.0 {
                    return base;
                }
                let u = 1.0 - inner.evaluate(z);
                if u <= 0.0 {
                    return 0.0;
                }
                base.min((u / (inner.r2_gradient_bound(z) + 1.0)).min(1.0))
            }
        }
    }

    /// Upper bound on |grad r^2| over a unit-radius probe ball around z;
    /// only defined for the r^2 models used with the lambda modification.
    fn r2_gradient_bound(&self, z: &[Complex64]) -> f64 {
        match &self.kind {
            ModelKind::FlatWeighted { weights } => {
                let wmax = weights.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
                let norm: f64 = z.iter().map(|zk| zk.norm_sqr()).sum::<f64>().sqrt();
                2.0 * wmax * (norm + 1.0)
            }
            ModelKind::ConicalPlane { beta } => {
                // |grad| <= 2 beta s^{2 beta - 1} + 2 |z_2| with s the |z_1|
                // range on the ball; probes stay above |z_1|/2 because the
                // overall distance bound is capped by |z_1|.
                let s = if *beta < 0.5 {
                    (z[0].norm() / 2.0).max(f64::MIN_POSITIVE)
                } else {
                    z[0].norm() + 1.0
                };
                2.0 * beta * s.powf(2.0 * beta - 1.0) + 2.0 * (z[1].norm() + 1.0)
            }
            _ => panic!("gradient bound requested for a non-r^2 model"),
        }
    }

    /// One-line parameter summary for reports and the CLI catalog.
    pub fn describe(&self) -> String {
        match &self.kind {
            ModelKind::FlatWeighted { weights } => {
                format!("sum of weighted |z_k|^2, weights {weights:?}")
            }
            ModelKind::FsConical { beta } => format!("log(1 + |z|^(2 beta)), beta = {beta}"),
            ModelKind::HyperbolicConical { beta } => {
                format!("-log(1 - |z|^(2 beta)), beta = {beta}")
            }
            ModelKind::FlatConical { beta } => format!("|z|^(2 beta), beta = {beta}"),
            ModelKind::Cusp1d => "-log(-log|z|^2)".into(),
            ModelKind::Cusp2d => "-log(-log|w|^2 - |z|^2)".into(),
            ModelKind::Cone { base, gamma } => {
                format!("(|w|^2 H(z))^gamma, base {}, gamma = {gamma}", base.describe())
            }
            ModelKind::ConicalPlane { beta } => {
                format!("|z_1|^(2 beta) + |z_2|^2, beta = {beta}")
            }
            ModelKind::LambdaModified { inner, lambda } => {
                format!("{} log(1 {} r^2), r^2 = {}", lambda, if *lambda > 0.0 { "+" } else { "-" }, inner.describe())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluator_spot_values() {
        let e = std::f64::consts::E;
        // cusp-1d at |z| = e^{-1}: -log|z|^2 = 2, value -log 2.
        let cusp = PotentialModel::cusp_1d();
        let got = cusp.evaluate(&[c(1.0 / e, 0.0)]);
        assert!((got + 2.0f64.ln()).abs() < 1e-14);

        // fs-conical beta = 1/2 at |z| = r: log(1 + r).
        let fs = PotentialModel::fs_conical(0.5);
        let got = fs.evaluate(&[c(0.0, 0.49)]);
        assert!((got - 1.49f64.ln()).abs() < 1e-14);

        // cone over 2 FS with gamma = 1/2 at (z, w) = (0, 1): (1 * 1)^0.5 = 1.
        let cone = PotentialModel::cone(BaseMetric::FubiniStudyDoubled, 0.5);
        assert!((cone.evaluate(&[c(0.0, 0.0), c(1.0, 0.0)]) - 1.0).abs() < 1e-14);

        // lambda modification of the flat plane is Fubini-Study.
        let fs2 = PotentialModel::lambda_modified(PotentialModel::flat(2), 1.0);
        let got = fs2.evaluate(&[c(1.0, 0.0), c(0.0, 2.0)]);
        assert!((got - 6.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn singular_distances() {
        let hyper = PotentialModel::hyperbolic_conical(0.5);
        assert!((hyper.singular_distance(&[c(0.0, 0.9)]) - 0.1).abs() < 1e-12);
        assert!((hyper.singular_distance(&[c(0.2, 0.0)]) - 0.2).abs() < 1e-12);
        // beta = 1 removes the cone point.
        let smooth = PotentialModel::hyperbolic_conical(1.0);
        assert!((smooth.singular_distance(&[c(0.05, 0.0)]) - 0.95).abs() < 1e-12);

        assert_eq!(
            PotentialModel::flat(2).singular_distance(&[c(0.0, 0.0), c(0.0, 0.0)]),
            f64::INFINITY
        );

        // cusp-2d: bound is positive inside, zero on/after the boundary.
        let cusp = PotentialModel::cusp_2d();
        let inside = cusp.singular_distance(&[c(0.3, 0.0), c(0.2, 0.1)]);
        assert!(inside > 0.05 && inside <= 0.3);
        assert_eq!(cusp.singular_distance(&[c(1.0, 0.0), c(0.5, 0.0)]), 0.0);
    }

    #[test]
    fn cusp_distance_bound_is_safe() {
        // Probing anywhere within the claimed bound keeps the evaluator finite.
        let cusp = PotentialModel::cusp_2d();
        let center = [c(0.25, 0.1), c(-0.3, 0.4)];
        let d = cusp.singular_distance(&center);
        assert!(d > 0.0);
        for k in 0..64 {
            let t = k as f64 * 0.7;
            let offset = 0.999 * d;
            let probe = [
                center[0] + offset * c(t.cos(), t.sin()) * 0.7,
                center[1] + offset * c((1.3 * t).cos(), (1.3 * t).sin()) * 0.7,
            ];
            assert!(cusp.evaluate(&probe).is_finite());
        }
    }

    #[test]
    fn lambda_negative_domain() {
        let ball = PotentialModel::lambda_modified(PotentialModel::flat(2), -1.0);
        assert!(ball.singular_distance(&[c(0.3, 0.0), c(0.0, 0.4)]) > 0.0);
        assert_eq!(ball.singular_distance(&[c(1.0, 0.0), c(0.5, 0.0)]), 0.0);
        // Conical r^2 keeps the z_1 = 0 margin as well.
        let conical = PotentialModel::lambda_modified(PotentialModel::conical_plane(0.5), -1.0);
        let d = conical.singular_distance(&[c(0.1, 0.0), c(0.2, 0.0)]);
        assert!(d > 0.0 && d <= 0.1);
    }

    #[test]
    fn base_metric_closed_forms() {
        let base = BaseMetric::FubiniStudyDoubled;
        let z = c(0.5, -0.5);
        assert!((base.h(z) - 2.25).abs() < 1e-14);
        assert!((base.g_base(z) - 2.0 / 2.25).abs() < 1e-14);
        let conical = BaseMetric::ConicalFubiniStudy { beta: 1.0 };
        // At beta = 1 the conical base is FS itself: g = 1/(1+|z|^2)^2.
        assert!((conical.g_base(z) - 1.0 / 2.25).abs() < 1e-12);
    }
}
