//! Curvature identity checks over the model catalog.
//!
//! The pipeline is potential -> metric -> Ricci by finite differences only:
//! g_ab = d^2 phi / dz_a dzbar_b, Ric = -ddbar log det g, and at N = 1 the
//! Gauss curvature K = -g^{-1} ddbar log g.  Conventions are fixed here and
//! repeated in every report so the constants are unambiguous.
//!
//! Step policy: the outer step defaults to min(dist, 1)/16 where dist is the
//! model's singular-distance bound, and any step must pass the dist/8 gate.
//! Nested differentiation freezes the inner step at 7/8 of the outer one, so
//! the full probe cloud stays within 2*sqrt(2)*(15/8)*h < 0.67*dist of the
//! center and halving the outer step halves the whole scheme (the designed
//! convergence order survives nesting).  Inner Hessians at outer probe
//! points skip the gate on purpose; non-finite values propagate as NaN and
//! are rejected once at the end.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::fd;
use super::models::{BaseMetric, PotentialModel};

/// Sign and normalization conventions quoted in every report.
pub const CONVENTION: &str = "g = ddbar phi; Ric = -ddbar log det g; K = -g^{-1} ddbar log g; \
     relative residual = max-entry residual / max(|expected|, |g|)";

/// Inner-to-outer step ratio for nested differentiation.
const INNER_STEP_RATIO: f64 = 7.0 / 8.0;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("finite-difference step {step} exceeds the safe limit {limit}")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("metric is not positive definite (smallest eigenvalue {min_eig})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("point outside the admissible region: {0}")]
    OutOfDomain(String),
    #[error("expected a chart point of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Metric tensor at a point together with its eigenvalue range and the step
/// that produced it.
#[derive(Debug, Clone)]
pub struct MetricValue {
    pub matrix: DMatrix<Complex64>,
    pub eig_min: f64,
    pub eig_max: f64,
    pub step: f64,
}

/// Ricci tensor at a point, with the metric it was derived from.
#[derive(Debug, Clone)]
pub struct RicciValue {
    pub ricci: DMatrix<Complex64>,
    pub metric: MetricValue,
    pub outer_step: f64,
    pub inner_step: f64,
}

fn check_dim(model: &PotentialModel, z: &[Complex64]) -> Result<(), MetricError> {
    if z.len() != model.dim() {
        return Err(MetricError::DimensionMismatch {
            expected: model.dim(),
            got: z.len(),
        });
    }
    Ok(())
}

fn admissible_distance(model: &PotentialModel, z: &[Complex64]) -> Result<f64, MetricError> {
    let dist = model.singular_distance(z);
    if dist <= 0.0 {
        return Err(MetricError::OutOfDomain(format!(
            "point touches the singular locus ({})",
            model.singular_locus()
        )));
    }
    Ok(dist)
}

fn default_step(dist: f64) -> f64 {
    dist.min(1.0) / 16.0
}

fn checked_step(step: Option<f64>, dist: f64) -> Result<f64, MetricError> {
    let h = match step {
        Some(h) => {
            assert!(h.is_finite() && h > 0.0, "step must be positive and finite");
            h
        }
        None => default_step(dist),
    };
    let limit = dist / 8.0;
    if h >= limit {
        return Err(MetricError::StepTooLarge { step: h, limit });
    }
    Ok(h)
}

/// Metric tensor by 4th-order differences with one Richardson level.
/// `step` of `None` selects min(dist, 1)/16.
pub fn metric_at(
    model: &PotentialModel,
    z: &[Complex64],
    step: Option<f64>,
) -> Result<MetricValue, MetricError> {
    check_dim(model, z)?;
    let dist = admissible_distance(model, z)?;
    let h = checked_step(step, dist)?;
    let phi = |p: &[Complex64]| model.evaluate(p);
    let matrix = fd::complex_hessian(&phi, z, h);
    if !matrix.iter().all(|e| e.re.is_finite() && e.im.is_finite()) {
        return Err(MetricError::OutOfDomain(
            "potential not finite within the probe cloud".into(),
        ));
    }
    let (eig_min, eig_max) = fd::hermitian_eigen_range(&matrix);
    if eig_min <= 0.0 {
        return Err(MetricError::NotPositiveDefinite { min_eig: eig_min });
    }
    Ok(MetricValue {
        matrix,
        eig_min,
        eig_max,
        step: h,
    })
}

/// Ricci tensor by nested differences: the outer Hessian acts on
/// log det g(p), where g(p) is an inner Hessian at the frozen step
/// INNER_STEP_RATIO * h.
pub fn ricci_at(
    model: &PotentialModel,
    z: &[Complex64],
    step: Option<f64>,
) -> Result<RicciValue, MetricError> {
    check_dim(model, z)?;
    let dist = admissible_distance(model, z)?;
    let h = checked_step(step, dist)?;
    let h_in = INNER_STEP_RATIO * h;
    let metric = metric_at(model, z, Some(h_in))?;
    let phi = |p: &[Complex64]| model.evaluate(p);
    let log_det =
        |p: &[Complex64]| fd::hermitian_det(&fd::complex_hessian(&phi, p, h_in)).ln();
    let ricci = -fd::complex_hessian(&log_det, z, h);
    if !ricci.iter().all(|e| e.re.is_finite() && e.im.is_finite()) {
        return Err(MetricError::OutOfDomain(
            "metric degenerated within the probe cloud".into(),
        ));
    }
    Ok(RicciValue {
        ricci,
        metric,
        outer_step: h,
        inner_step: h_in,
    })
}

/// Gauss curvature K = -g^{-1} ddbar log g for one-dimensional models.
pub fn gauss_curvature_1d(
    model: &PotentialModel,
    z: &[Complex64],
    step: Option<f64>,
) -> Result<f64, MetricError> {
    if model.dim() != 1 {
        return Err(MetricError::DimensionMismatch {
            expected: 1,
            got: model.dim(),
        });
    }
    let rv = ricci_at(model, z, step)?;
    Ok(rv.ricci[(0, 0)].re / rv.metric.matrix[(0, 0)].re)
}

/// Residual statistics for one identity over a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub model: String,
    pub identity: String,
    pub convention: String,
    pub samples: usize,
    pub metric_eig_min: f64,
    pub metric_eig_max: f64,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub argmax_sample: Vec<[f64; 2]>,
    pub outer_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_step: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

struct ResidualStats {
    samples: usize,
    eig_min: f64,
    eig_max: f64,
    max_abs: f64,
    max_rel: f64,
    argmax: Vec<Complex64>,
    argmax_outer: f64,
    argmax_inner: Option<f64>,
}

impl ResidualStats {
    fn new() -> Self {
        ResidualStats {
            samples: 0,
            eig_min: f64::INFINITY,
            eig_max: f64::NEG_INFINITY,
            max_abs: 0.0,
            max_rel: 0.0,
            argmax: Vec::new(),
            argmax_outer: 0.0,
            argmax_inner: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        z: &[Complex64],
        abs: f64,
        denom: f64,
        eig_min: f64,
        eig_max: f64,
        outer: f64,
        inner: Option<f64>,
    ) {
        let rel = abs / denom;
        self.samples += 1;
        self.eig_min = self.eig_min.min(eig_min);
        self.eig_max = self.eig_max.max(eig_max);
        self.max_abs = self.max_abs.max(abs);
        // Strict comparison keeps the earliest sample on ties.
        if rel > self.max_rel || self.argmax.is_empty() {
            self.max_rel = rel;
            self.argmax = z.to_vec();
            self.argmax_outer = outer;
            self.argmax_inner = inner;
        }
    }

    fn into_report(self, model: &str, identity: String, tolerance: f64) -> CurvatureReport {
        assert!(self.samples > 0, "report requires at least one sample");
        CurvatureReport {
            model: model.to_string(),
            identity,
            convention: CONVENTION.to_string(),
            samples: self.samples,
            metric_eig_min: self.eig_min,
            metric_eig_max: self.eig_max,
            max_abs_residual: self.max_abs,
            max_rel_residual: self.max_rel,
            argmax_sample: self.argmax.iter().map(|c| [c.re, c.im]).collect(),
            outer_step: self.argmax_outer,
            inner_step: self.argmax_inner,
            tolerance,
            passed: self.max_rel <= tolerance,
        }
    }
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// Check Ric = constant * g over the sample set.
pub fn verify_einstein(
    model: &PotentialModel,
    constant: f64,
    samples: &[Vec<Complex64>],
    tolerance: f64,
) -> Result<CurvatureReport, MetricError> {
    assert!(!samples.is_empty(), "sample set must not be empty");
    let mut stats = ResidualStats::new();
    for z in samples {
        let rv = ricci_at(model, z, None)?;
        let expected = &rv.metric.matrix * Complex64::new(constant, 0.0);
        let residual = &rv.ricci - &expected;
        let denom = max_entry(&expected).max(max_entry(&rv.metric.matrix));
        stats.record(
            z,
            max_entry(&residual),
            denom,
            rv.metric.eig_min,
            rv.metric.eig_max,
            rv.outer_step,
            Some(rv.inner_step),
        );
    }
    Ok(stats.into_report(model.name(), format!("Ric = {constant} g"), tolerance))
}

/// Paired reports for the cone Ricci lemma: the exact identity
/// Ric(cone) = (mu - (n+1) gamma) pullback(omega_base) with n = 1, and the
/// Ricci-flatness statement it reduces to at gamma = mu/(n+1).
#[derive(Debug, Clone, Serialize)]
pub struct ConeRicciReport {
    pub gamma: f64,
    pub mu: f64,
    pub lemma: CurvatureReport,
    pub flatness: CurvatureReport,
}

pub fn verify_cone_ricci(
    base: BaseMetric,
    gamma: f64,
    samples: &[Vec<Complex64>],
    tolerance: f64,
) -> Result<ConeRicciReport, MetricError> {
    assert!(!samples.is_empty(), "sample set must not be empty");
    let model = PotentialModel::cone(base, gamma);
    let mu = base.mu();
    let mut lemma = ResidualStats::new();
    let mut flat = ResidualStats::new();
    for z in samples {
        let rv = ricci_at(&model, z, None)?;
        let mut expected = DMatrix::<Complex64>::zeros(2, 2);
        expected[(0, 0)] = Complex64::new((mu - 2.0 * gamma) * base.g_base(z[0]), 0.0);
        let residual = &rv.ricci - &expected;
        let denom = max_entry(&expected).max(max_entry(&rv.metric.matrix));
        lemma.record(
            z,
            max_entry(&residual),
            denom,
            rv.metric.eig_min,
            rv.metric.eig_max,
            rv.outer_step,
            Some(rv.inner_step),
        );
        flat.record(
            z,
            max_entry(&rv.ricci),
            max_entry(&rv.metric.matrix),
            rv.metric.eig_min,
            rv.metric.eig_max,
            rv.outer_step,
            Some(rv.inner_step),
        );
    }
    Ok(ConeRicciReport {
        gamma,
        mu,
        lemma: lemma.into_report(
            model.name(),
            format!("Ric(cone) = (mu - 2 gamma) g_base dz dzbar, mu = {mu}, gamma = {gamma}"),
            tolerance,
        ),
        flatness: flat.into_report(model.name(), "Ric(cone) = 0".to_string(), tolerance),
    })
}

/// Paired reports for the lambda modification phi = lambda log(1 + lambda r^2):
/// the volume-form ratio det g_mod / det g_base = (1 + lambda r^2)^{-(N+1)}
/// and the Einstein identity Ric = lambda (N+1) g.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    pub lambda: f64,
    pub einstein_constant: f64,
    pub volume: CurvatureReport,
    pub einstein: CurvatureReport,
}

pub fn verify_lambda_modification(
    inner: &PotentialModel,
    lambda: f64,
    samples: &[Vec<Complex64>],
    volume_tolerance: f64,
    einstein_tolerance: f64,
) -> Result<LambdaReport, MetricError> {
    assert!(!samples.is_empty(), "sample set must not be empty");
    let model = PotentialModel::lambda_modified(inner.clone(), lambda);
    let exponent = inner.dim() as f64 + 1.0;
    let mut vol = ResidualStats::new();
    for z in samples {
        let g_mod = metric_at(&model, z, None)?;
        let g_base = metric_at(inner, z, None)?;
        let r2 = inner.evaluate(z);
        let expected = (1.0 + lambda * r2).powf(-exponent);
        let ratio = fd::hermitian_det(&g_mod.matrix) / fd::hermitian_det(&g_base.matrix);
        vol.record(
            z,
            (ratio - expected).abs(),
            expected.abs(),
            g_mod.eig_min,
            g_mod.eig_max,
            g_mod.step,
            None,
        );
    }
    let einstein_constant = lambda * exponent;
    let einstein = verify_einstein(&model, einstein_constant, samples, einstein_tolerance)?;
    Ok(LambdaReport {
        lambda,
        einstein_constant,
        volume: vol.into_report(
            model.name(),
            format!("det g_mod / det g_base = (1 + lambda r^2)^(-{exponent})"),
            volume_tolerance,
        ),
        einstein,
    })
}

/// One gamma row of the cone-to-cusp degeneration table.
#[derive(Debug, Clone, Serialize)]
pub struct ConeToCuspRow {
    pub gamma: f64,
    pub max_deviation: f64,
    pub argmax_rho: f64,
}

/// Deviation table for (1 - rho^{2 gamma})/gamma -> -log rho^2 as gamma -> 0.
#[derive(Debug, Clone, Serialize)]
pub struct ConeToCuspReport {
    pub rho: Vec<f64>,
    pub rows: Vec<ConeToCuspRow>,
    pub monotone_decreasing: bool,
    pub final_deviation: f64,
}

/// Tabulate sup over rho of |(1 - rho^{2 gamma})/gamma - (-log rho^2)| for a
/// decreasing gamma sequence.  Uses expm1 so the small-gamma rows are not
/// destroyed by cancellation.
pub fn verify_cone_to_cusp(rho: &[f64], gammas: &[f64]) -> ConeToCuspReport {
    assert!(!rho.is_empty() && !gammas.is_empty(), "empty sample set");
    assert!(
        rho.iter().all(|r| 0.0 < *r && *r < 1.0),
        "rho samples must lie in (0, 1)"
    );
    assert!(gammas.iter().all(|g| *g > 0.0), "gamma must be positive");
    assert!(
        gammas.windows(2).all(|w| w[0] > w[1]),
        "gamma sequence must be strictly decreasing"
    );
    let rows: Vec<ConeToCuspRow> = gammas
        .iter()
        .map(|&gamma| {
            let mut best = (f64::NEG_INFINITY, rho[0]);
            for &r in rho {
                let dev = (-(2.0 * gamma * r.ln()).exp_m1() / gamma + 2.0 * r.ln()).abs();
                if dev > best.0 {
                    best = (dev, r);
                }
            }
            ConeToCuspRow {
                gamma,
                max_deviation: best.0,
                argmax_rho: best.1,
            }
        })
        .collect();
    let monotone_decreasing = rows
        .windows(2)
        .all(|w| w[0].max_deviation > w[1].max_deviation);
    let final_deviation = rows.last().unwrap().max_deviation;
    ConeToCuspReport {
        rho: rho.to_vec(),
        rows,
        monotone_decreasing,
        final_deviation,
    }
}

/// Deterministic one-dimensional sample spread with radii in [r_min, r_max];
/// angles step by the golden angle to avoid axis alignment.
pub fn annulus_samples(r_min: f64, r_max: f64, count: usize) -> Vec<Vec<Complex64>> {
    assert!(count > 0 && r_min >= 0.0 && r_max > r_min);
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            let r = r_min + t * (r_max - r_min);
            let theta = i as f64 * 2.399_963_229_728_653;
            vec![Complex64::from_polar(r, theta)]
        })
        .collect()
}

/// Deterministic two-dimensional sample spread with |z_1| in `first` and
/// |z_2| in `second`; the second radius walks a low-discrepancy sequence so
/// the two coordinates decorrelate.
pub fn band_samples_2d(first: (f64, f64), second: (f64, f64), count: usize) -> Vec<Vec<Complex64>> {
    assert!(count > 0 && first.1 > first.0 && second.1 > second.0);
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            let s = ((i as f64 + 0.5) * 0.618_033_988_749_894_9).fract();
            let r1 = first.0 + t * (first.1 - first.0);
            let r2 = second.0 + s * (second.1 - second.0);
            let th1 = i as f64 * 2.399_963_229_728_653;
            let th2 = 0.7 + i as f64 * 1.823;
            vec![
                Complex64::from_polar(r1, th1),
                Complex64::from_polar(r2, th2),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn metric_examples() {
        // phi = |z|^2 gives the identity matrix at any point.
        let flat = PotentialModel::flat(2);
        let g = metric_at(&flat, &[c(0.3, -0.2), c(1.1, 0.7)], None).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g.matrix[(a, b)] - want).norm() < 1e-12);
            }
        }

        // phi = |z_1|^2 + 2 |z_2|^2 gives diag(1, 2).
        let weighted = PotentialModel::flat_weighted(vec![1.0, 2.0]);
        let g = metric_at(&weighted, &[c(0.5, 0.5), c(-0.3, 0.1)], None).unwrap();
        assert!((g.matrix[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((g.matrix[(1, 1)].re - 2.0).abs() < 1e-12);
        assert!((g.eig_min - 1.0).abs() < 1e-10 && (g.eig_max - 2.0).abs() < 1e-10);

        // Fubini-Study at the origin: g = 1 (closed form (1+|z|^2)^{-2}).
        let fs = PotentialModel::lambda_modified(PotentialModel::flat(1), 1.0);
        let g = metric_at(&fs, &[c(0.0, 0.0)], None).unwrap();
        assert!((g.matrix[(0, 0)].re - 1.0).abs() < 1e-6);
        // Off the origin as well, against the closed form.
        let z = c(0.4, -0.3);
        let g = metric_at(&fs, &[z], None).unwrap();
        let want = (1.0 + z.norm_sqr()).powi(-2);
        assert!((g.matrix[(0, 0)].re - want).abs() / want < 1e-6);
    }

    #[test]
    fn metric_errors() {
        let hyper = PotentialModel::hyperbolic_conical(0.5);
        // dist = 0.5 at z = 0.5 i, so the gate is h < 1/16.
        let err = metric_at(&hyper, &[c(0.0, 0.5)], Some(0.1)).unwrap_err();
        assert!(matches!(err, MetricError::StepTooLarge { .. }));

        let bad = PotentialModel::flat_weighted(vec![1.0, -1.0]);
        let err = metric_at(&bad, &[c(0.1, 0.0), c(0.0, 0.1)], None).unwrap_err();
        assert!(matches!(
            err,
            MetricError::NotPositiveDefinite { min_eig } if min_eig < 0.0
        ));

        let ball = PotentialModel::lambda_modified(PotentialModel::flat(1), -1.0);
        let err = metric_at(&ball, &[c(1.2, 0.0)], None).unwrap_err();
        assert!(matches!(err, MetricError::OutOfDomain(_)));

        let err = metric_at(&PotentialModel::flat(2), &[c(0.1, 0.0)], None).unwrap_err();
        assert!(matches!(
            err,
            MetricError::DimensionMismatch {
                expected: 2,
                got: 1
            }
        ));
    }

    #[test]
    fn ricci_examples() {
        // Flat potential: Ricci vanishes.
        let flat = PotentialModel::flat(2);
        let rv = ricci_at(&flat, &[c(0.4, 0.1), c(-0.2, 0.3)], None).unwrap();
        assert!(max_entry(&rv.ricci) < 1e-9);

        // Fubini-Study at N = 1: Ric = 2 g.
        let fs = PotentialModel::lambda_modified(PotentialModel::flat(1), 1.0);
        let rv = ricci_at(&fs, &[c(0.5, -0.2)], None).unwrap();
        let g = rv.metric.matrix[(0, 0)].re;
        assert!((rv.ricci[(0, 0)].re - 2.0 * g).abs() / g < 1e-6);
    }

    #[test]
    fn cusp_2d_is_einstein() {
        // -log(-log|w|^2 - |z|^2): Ric = -3 g at interior points.
        let cusp = PotentialModel::cusp_2d();
        let samples = band_samples_2d((0.20, 0.32), (0.05, 0.45), 6);
        let report = verify_einstein(&cusp, -3.0, &samples, 1e-4).unwrap();
        assert!(report.passed, "max rel residual {}", report.max_rel_residual);
        assert!(report.metric_eig_min > 0.0);
    }

    #[test]
    fn gauss_curvature_models() {
        // log(1 + |z|^{2 beta}) has K = +2 for every beta.
        for beta in [0.5, 0.75, 1.0] {
            let model = PotentialModel::fs_conical(beta);
            let k = gauss_curvature_1d(&model, &[c(0.44, 0.31)], None).unwrap();
            assert!((k - 2.0).abs() < 1e-5, "beta {beta}: K = {k}");
        }
        // -log(1 - |z|^{2 beta}) has K = -2.
        let model = PotentialModel::hyperbolic_conical(0.75);
        let k = gauss_curvature_1d(&model, &[c(0.3, -0.25)], None).unwrap();
        assert!((k + 2.0).abs() < 1e-5);
        // |z|^{2 beta} is flat.
        let model = PotentialModel::flat_conical(0.5);
        let k = gauss_curvature_1d(&model, &[c(0.0, 0.6)], None).unwrap();
        assert!(k.abs() < 1e-6);
        // Cusp: -log(-log|z|^2) has K = -2.
        let model = PotentialModel::cusp_1d();
        let k = gauss_curvature_1d(&model, &[c(0.35, 0.1)], None).unwrap();
        assert!((k + 2.0).abs() < 1e-5);
    }

    #[test]
    fn cone_ricci_lemma_and_negative_control() {
        let samples = band_samples_2d((0.1, 0.8), (0.7, 1.3), 5);
        // gamma = mu/2 = 1/2: the cone is Ricci-flat, so both reports pass.
        let report =
            verify_cone_ricci(BaseMetric::FubiniStudyDoubled, 0.5, &samples, 1e-4).unwrap();
        assert!(report.lemma.passed, "lemma: {}", report.lemma.max_rel_residual);
        assert!(report.flatness.passed);
        // gamma = 3/4: the lemma still holds but flatness fails visibly.
        let report =
            verify_cone_ricci(BaseMetric::FubiniStudyDoubled, 0.75, &samples, 1e-4).unwrap();
        assert!(report.lemma.passed, "lemma: {}", report.lemma.max_rel_residual);
        assert!(report.flatness.max_rel_residual > 1e-2);
        assert!(!report.flatness.passed);
    }

    #[test]
    fn conical_base_cone_is_flat_at_gamma_one() {
        // Base Ric = 2 omega, gamma = 1 = mu/2: flat away from z = 0, w = 0.
        let samples = band_samples_2d((0.4, 0.9), (0.7, 1.2), 4);
        let base = BaseMetric::ConicalFubiniStudy { beta: 0.5 };
        let report = verify_cone_ricci(base, 1.0, &samples, 1e-4).unwrap();
        assert!(report.flatness.passed, "residual {}", report.flatness.max_rel_residual);
    }

    #[test]
    fn lambda_modification_identities() {
        // r^2 = |z|^2 on C^2, lambda = +1: Fubini-Study, Ric = 3 g.
        let inner = PotentialModel::flat(2);
        let samples = band_samples_2d((0.1, 0.5), (0.1, 0.5), 5);
        let report = verify_lambda_modification(&inner, 1.0, &samples, 1e-6, 1e-4).unwrap();
        assert!(report.volume.passed, "volume: {}", report.volume.max_rel_residual);
        assert!(report.einstein.passed, "einstein: {}", report.einstein.max_rel_residual);
        assert!((report.einstein_constant - 3.0).abs() < 1e-15);

        // lambda = -1 on the unit ball: complex hyperbolic, Ric = -3 g.
        let samples = band_samples_2d((0.1, 0.4), (0.1, 0.4), 5);
        let report = verify_lambda_modification(&inner, -1.0, &samples, 1e-6, 1e-4).unwrap();
        assert!(report.volume.passed && report.einstein.passed);

        // Conical r^2 away from z_1 = 0.
        let conical = PotentialModel::conical_plane(0.5);
        let samples = band_samples_2d((0.25, 0.45), (0.1, 0.35), 5);
        let report = verify_lambda_modification(&conical, -1.0, &samples, 1e-6, 1e-4).unwrap();
        assert!(report.volume.passed, "volume: {}", report.volume.max_rel_residual);
        assert!(report.einstein.passed, "einstein: {}", report.einstein.max_rel_residual);
    }

    #[test]
    fn lambda_negative_rejects_exterior() {
        let inner = PotentialModel::flat(2);
        let err = verify_lambda_modification(
            &inner,
            -1.0,
            &[vec![c(0.9, 0.0), c(0.5, 0.0)]],
            1e-6,
            1e-4,
        )
        .unwrap_err();
        assert!(matches!(err, MetricError::OutOfDomain(_)));
    }

    #[test]
    fn cone_to_cusp_table() {
        let rho: Vec<f64> = (0..12).map(|i| 0.1 + (i as f64 + 0.5) * 0.8 / 12.0).collect();
        let gammas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let report = verify_cone_to_cusp(&rho, &gammas);
        assert!(report.monotone_decreasing);
        assert!(report.final_deviation < 1e-5);

        // At fixed rho = e^{-1/2} the deviation is linear in gamma:
        // dev ~ gamma * (log rho^2)^2 / 2 = gamma / 2.
        let single = [(-0.5f64).exp()];
        let fine = verify_cone_to_cusp(&single, &[1e-3, 1e-4]);
        let ratio = fine.rows[0].max_deviation / fine.rows[1].max_deviation;
        assert!((ratio - 10.0).abs() < 0.1, "ratio {ratio}");
        assert!((fine.rows[0].max_deviation - 5e-4).abs() < 5e-6);

        // rho -> 1 at fixed gamma: both sides vanish.
        let near_one = verify_cone_to_cusp(&[0.999], &[0.1]);
        assert!(near_one.rows[0].max_deviation < 1e-4);
    }

    #[test]
    fn nested_differences_converge_at_design_order() {
        // Smooth hyperbolic model with closed-form Ric = -2 g; halving the
        // step must shrink the residual by at least 8x while truncation
        // dominates.
        let model = PotentialModel::hyperbolic_conical(1.0);
        let z = [c(0.3, 0.0)];
        let g_exact = (1.0 - z[0].norm_sqr()).powi(-2);
        let err_at = |h: f64| {
            let rv = ricci_at(&model, &z, Some(h)).unwrap();
            (rv.ricci[(0, 0)].re + 2.0 * g_exact).abs()
        };
        let coarse = err_at(0.08);
        let fine = err_at(0.04);
        assert!(
            coarse / fine > 8.0,
            "convergence ratio {} (coarse {coarse}, fine {fine})",
            coarse / fine
        );
    }
}
