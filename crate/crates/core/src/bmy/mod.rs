//! Exact log Chern-class calculus for weighted arrangements and the
//! Bogomolov-Miyaoka-Yau quadratic form in the divisor weights.
//!
//! For a pair (X, D) with D = sum_l (1 - beta_l) D_l and divisor weights
//! mu_l = 1 - beta_l, all classes paired against hyperplane powers:
//!
//!   c1(X, D) = c1(X) - sum_l mu_l [D_l],
//!   c2(X, D) = c2(X) + sum_l (beta_l - 1)(-K_X.D_l - D_l^2)
//!              + sum_S (nu_S - (1 + sum_{S in D_l} (beta_l - 1))) [S],
//!
//! where nu_S is the volume density of the codimension-2 stratum S: the
//! product beta_a beta_b for a transverse double point and gamma^2 with
//! 2 gamma = 2 + sum (beta_l - 1) for a multiple point of line-like divisors.
//!
//! The defect is fixed as bmy_defect = 2(n+1) c2(X,D) - n c1(X,D)^2, oriented
//! so that constant-holomorphic-sectional-curvature pairs give exactly zero
//! and the classical surface inequality c1^2 <= 3 c2 makes it nonnegative.
//! `prop_form` expands the defect symbolically in the weights; for hyperplane
//! data the constant and linear parts cancel identically, and any survivors
//! are reported as a NonHomogeneous error rather than dropped.

mod arrangement;
mod matrix;
mod quadform;

pub use arrangement::{
    complete_quadrilateral, dm_arrangement, dm_induced_weights, index_pairs, triangle,
    Codim2Stratum, Divisor, IntersectionKind, WeightedArrangement,
};
pub use matrix::RationalMatrix;
pub use quadform::{KernelBasis, QuadraticForm};

use quadform::QuadPoly;
use thiserror::Error;

use crate::rational::Rational;

fn fmt_linear(linear: &[Rational]) -> String {
    let parts: Vec<String> = linear.iter().map(Rational::to_string).collect();
    parts.join(", ")
}

/// Errors from arrangement handling and Chern/BMY evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BmyError {
    /// Structurally invalid arrangement data.
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    /// A matrix row had the wrong length.
    #[error("matrix row {row} has {got} entries, expected {expected}")]
    MatrixShape {
        row: usize,
        expected: usize,
        got: usize,
    },
    /// A weight assignment had the wrong length.
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    /// A numeric weight left the open interval (0, 1).
    #[error("weight for {name} is {value}, outside (0, 1)")]
    WeightOutOfRange { name: String, value: Rational },
    /// A numeric operation hit a divisor without a numeric weight.
    #[error("divisor {name} has a symbolic weight; supply a numeric assignment")]
    MissingWeight { name: String },
    /// A multiple point fails the klt condition.
    #[error("codimension-2 stratum is not klt: gamma = {gamma} is not positive")]
    NotKlt { gamma: Rational },
    /// The expanded defect kept constant or linear terms.
    #[error(
        "defect form is not homogeneous: constant = {constant}, linear = [{}]",
        fmt_linear(.linear)
    )]
    NonHomogeneous {
        constant: Rational,
        linear: Vec<Rational>,
    },
}

fn validate_assignment(arr: &WeightedArrangement, mu: &[Rational]) -> Result<(), BmyError> {
    if mu.len() != arr.divisors().len() {
        return Err(BmyError::WeightCount {
            expected: arr.divisors().len(),
            got: mu.len(),
        });
    }
    for (d, w) in arr.divisors().iter().zip(mu) {
        if !w.is_positive() || *w >= Rational::one() {
            return Err(BmyError::WeightOutOfRange {
                name: d.name.clone(),
                value: w.clone(),
            });
        }
    }
    Ok(())
}

/// First log Chern number c1(X, D) = c1(X) - sum_l mu_l [D_l] at a numeric
/// weight assignment (one weight per divisor, in divisor order).
pub fn c1_log(arr: &WeightedArrangement, mu: &[Rational]) -> Result<Rational, BmyError> {
    validate_assignment(arr, mu)?;
    let mut total = arr.c1().clone();
    for (d, w) in arr.divisors().iter().zip(mu) {
        total = total - w * &d.class;
    }
    Ok(total)
}

/// Volume density of a codimension-2 stratum from the incident cone angles:
/// beta_1 beta_2 for a transverse double point, gamma^2 with
/// 2 gamma = 2 + sum_l (beta_l - 1) for a multiple point (erroring when
/// gamma <= 0, the non-klt case).
pub fn codim2_density(kind: IntersectionKind, betas: &[Rational]) -> Result<Rational, BmyError> {
    match kind {
        IntersectionKind::Double => {
            if betas.len() != 2 {
                return Err(BmyError::InvalidArrangement(format!(
                    "double point needs exactly 2 angles, got {}",
                    betas.len()
                )));
            }
            Ok(&betas[0] * &betas[1])
        }
        IntersectionKind::Multiple => {
            if betas.len() < 3 {
                return Err(BmyError::InvalidArrangement(format!(
                    "multiple point needs at least 3 angles, got {}",
                    betas.len()
                )));
            }
            let excess: Rational = betas.iter().map(|b| b - Rational::one()).sum();
            let gamma = Rational::one() + excess / Rational::from_int(2);
            if !gamma.is_positive() {
                return Err(BmyError::NotKlt { gamma });
            }
            Ok(gamma.pow(2))
        }
    }
}

/// Second log Chern number c2(X, D) at a numeric weight assignment.
pub fn c2_log(arr: &WeightedArrangement, mu: &[Rational]) -> Result<Rational, BmyError> {
    validate_assignment(arr, mu)?;
    let mut total = arr.c2().clone();
    for (d, w) in arr.divisors().iter().zip(mu) {
        // beta - 1 = -mu.
        total = total - w * (&d.minus_k_dot - &d.self_int);
    }
    for s in arr.strata() {
        let betas: Vec<Rational> = s
            .divisors
            .iter()
            .map(|&l| Rational::one() - &mu[l])
            .collect();
        let nu = codim2_density(s.kind, &betas)?;
        let incident_mass: Rational = s.divisors.iter().map(|&l| mu[l].clone()).sum();
        // nu_S - (1 + sum (beta - 1)) = nu_S - 1 + sum mu.
        let excess = nu - Rational::one() + incident_mass;
        total = total + excess * &s.class;
    }
    Ok(total)
}

/// The defect 2(n+1) c2(X, D) - n c1(X, D)^2; zero characterizes the
/// constant-holomorphic-sectional-curvature case.
pub fn bmy_defect(arr: &WeightedArrangement, mu: &[Rational]) -> Result<Rational, BmyError> {
    let n = arr.ambient_dim() as i64;
    let c1 = c1_log(arr, mu)?;
    let c2 = c2_log(arr, mu)?;
    Ok(Rational::from_int(2 * (n + 1)) * c2 - Rational::from_int(n) * c1.pow(2))
}

/// Symbolic expansion of `bmy_defect` as a quadratic form in the divisor
/// weights.  For hyperplane data the constant and linear parts vanish
/// identically; any survivors abort with NonHomogeneous, carrying the parts.
///
/// The multiple-point density gamma^2 is expanded as a polynomial; unlike the
/// numeric path there is no klt positivity check on symbolic gamma.
pub fn prop_form(arr: &WeightedArrangement) -> Result<QuadraticForm, BmyError> {
    let nv = arr.divisors().len();
    let n = arr.ambient_dim() as i64;
    let variables: Vec<String> = arr.divisors().iter().map(|d| d.name.clone()).collect();

    let mut c1 = QuadPoly::constant(nv, arr.c1().clone());
    for (l, d) in arr.divisors().iter().enumerate() {
        c1.add_scaled(&QuadPoly::variable(nv, l), &-&d.class);
    }

    let mut c2 = QuadPoly::constant(nv, arr.c2().clone());
    for (l, d) in arr.divisors().iter().enumerate() {
        let coeff = -(&d.minus_k_dot - &d.self_int);
        c2.add_scaled(&QuadPoly::variable(nv, l), &coeff);
    }
    for s in arr.strata() {
        let nu = match s.kind {
            IntersectionKind::Double => {
                let a = s.divisors[0];
                let b = s.divisors[1];
                let one_minus = |l: usize| {
                    let mut p = QuadPoly::constant(nv, Rational::one());
                    p.add_scaled(&QuadPoly::variable(nv, l), &Rational::from_int(-1));
                    p
                };
                one_minus(a).mul_affine(&one_minus(b))
            }
            IntersectionKind::Multiple => {
                let mut gamma = QuadPoly::constant(nv, Rational::one());
                for &l in &s.divisors {
                    gamma.add_scaled(&QuadPoly::variable(nv, l), &Rational::new(-1, 2));
                }
                gamma.square_affine()
            }
        };
        let mut term = nu;
        term.add_scaled(
            &QuadPoly::constant(nv, Rational::one()),
            &Rational::from_int(-1),
        );
        for &l in &s.divisors {
            term.add(&QuadPoly::variable(nv, l));
        }
        term.scale(&s.class);
        c2.add(&term);
    }

    let mut defect = c1.square_affine();
    defect.scale(&Rational::from_int(-n));
    defect.add_scaled(&c2, &Rational::from_int(2 * (n + 1)));

    let form = QuadraticForm::from_poly(variables, defect);
    if !form.is_homogeneous() {
        return Err(BmyError::NonHomogeneous {
            constant: form.constant,
            linear: form.linear,
        });
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn empty_plane() -> WeightedArrangement {
        WeightedArrangement::new(2, q(3, 1), q(3, 1), vec![], vec![]).unwrap()
    }

    fn single_line(class: i64, minus_k_dot: i64, self_int: i64) -> WeightedArrangement {
        WeightedArrangement::new(
            2,
            q(3, 1),
            q(3, 1),
            vec![Divisor {
                name: "L".into(),
                weight: None,
                class: q(class, 1),
                minus_k_dot: q(minus_k_dot, 1),
                self_int: q(self_int, 1),
            }],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn c1_log_examples() {
        assert_eq!(c1_log(&empty_plane(), &[]).unwrap(), q(3, 1));
        assert_eq!(
            c1_log(&single_line(1, 3, 1), &[q(2, 5)]).unwrap(),
            q(13, 5)
        );
        // Pair arrangement: c1 = (n+1)(1 - S) at induced weights.
        for n in [2usize, 3] {
            let mu: Vec<Rational> = (0..n + 2).map(|k| q(1, 7 + k as i64)).collect();
            let s: Rational = mu.iter().sum();
            let arr = dm_arrangement(n);
            let induced = dm_induced_weights(n, &mu).unwrap();
            let expected = Rational::from_int(n as i64 + 1) * (Rational::one() - s);
            assert_eq!(c1_log(&arr, &induced).unwrap(), expected);
        }
    }

    #[test]
    fn codim2_density_examples() {
        assert_eq!(
            codim2_density(IntersectionKind::Double, &[q(1, 2), q(1, 3)]).unwrap(),
            q(1, 6)
        );
        // Equal-angle triple point: gamma = (3 beta - 1)/2.
        let beta = q(2, 3);
        let nu = codim2_density(
            IntersectionKind::Multiple,
            &[beta.clone(), beta.clone(), beta.clone()],
        )
        .unwrap();
        assert_eq!(nu, q(1, 4));
        // Pair-divisor triple: gamma = 1 - (mu_i + mu_j + mu_k).
        let (mi, mj, mk) = (q(1, 5), q(1, 7), q(1, 9));
        let betas: Vec<Rational> = [(&mi, &mj), (&mi, &mk), (&mj, &mk)]
            .iter()
            .map(|(a, b)| Rational::one() - *a - *b)
            .collect();
        let nu = codim2_density(IntersectionKind::Multiple, &betas).unwrap();
        assert_eq!(nu, (Rational::one() - mi - mj - mk).pow(2));
        // Small angles make gamma nonpositive.
        let tight = q(1, 4);
        assert!(matches!(
            codim2_density(
                IntersectionKind::Multiple,
                &[tight.clone(), tight.clone(), tight.clone()]
            ),
            Err(BmyError::NotKlt { .. })
        ));
        assert!(codim2_density(IntersectionKind::Double, &[q(1, 2)]).is_err());
        assert!(
            codim2_density(IntersectionKind::Multiple, &[q(1, 2), q(1, 2)]).is_err()
        );
    }

    #[test]
    fn c2_log_examples() {
        assert_eq!(c2_log(&empty_plane(), &[]).unwrap(), q(3, 1));
        // Triangle with equal weights: 3 - 6 mu + 3 mu^2.
        let arr = triangle();
        for mu in [q(1, 2), q(1, 3), q(2, 7)] {
            let assignment = vec![mu.clone(); 3];
            let expected =
                q(3, 1) - q(6, 1) * &mu + q(3, 1) * mu.pow(2);
            assert_eq!(c2_log(&arr, &assignment).unwrap(), expected);
        }
        // Pair arrangement: c2 = n(n+1)/2 (1 - 2S + S^2) at induced weights.
        for n in [2usize, 3] {
            let mu: Vec<Rational> = (0..n + 2).map(|k| q(1, 9 + 2 * k as i64)).collect();
            let s: Rational = mu.iter().sum();
            let arr = dm_arrangement(n);
            let induced = dm_induced_weights(n, &mu).unwrap();
            let expected = Rational::from_int((n as i64 + 1) * n as i64) / q(2, 1)
                * (Rational::one() - q(2, 1) * &s + s.pow(2));
            assert_eq!(c2_log(&arr, &induced).unwrap(), expected);
        }
    }

    #[test]
    fn defect_examples() {
        assert!(bmy_defect(&empty_plane(), &[]).unwrap().is_zero());
        // Triangle at mu = 1/2 on all lines is an orbifold quotient: defect 0.
        let arr = triangle();
        assert!(bmy_defect(&arr, &vec![q(1, 2); 3]).unwrap().is_zero());
        // Generic unequal triangle weights do not cancel:
        // 6 Q - 2 M^2 with Q = 1/3, M = 31/30 gives -61/450.
        let got = bmy_defect(&arr, &[q(1, 2), q(1, 3), q(1, 5)]).unwrap();
        assert_eq!(got, q(-61, 450));
        // Pair arrangements at induced weights are exactly balanced.
        for n in [2usize, 3, 4] {
            let mu: Vec<Rational> = (0..n + 2).map(|k| q(1, 5 + k as i64)).collect();
            let arr = dm_arrangement(n);
            let induced = dm_induced_weights(n, &mu).unwrap();
            assert!(bmy_defect(&arr, &induced).unwrap().is_zero());
        }
    }

    #[test]
    fn quadrilateral_form_is_homogeneous_with_kernel_dimension_four() {
        let form = prop_form(&complete_quadrilateral()).unwrap();
        assert_eq!(form.variables.len(), 6);
        assert!(form.is_homogeneous());
        let kernel = form.kernel().unwrap();
        assert_eq!(kernel.dimension, 4);
        let m = RationalMatrix::from_rows(form.matrix.clone()).unwrap();
        assert_eq!(m.rank() + kernel.dimension, 6);
        for v in &kernel.basis {
            assert!(m.mul_vec(v).iter().all(Rational::is_zero));
        }
    }

    #[test]
    fn pair_family_lies_in_dm_kernel() {
        for n in [2usize, 3] {
            let arr = dm_arrangement(n);
            let form = prop_form(&arr).unwrap();
            let m = RationalMatrix::from_rows(form.matrix.clone()).unwrap();
            let pairs = index_pairs(n + 2);
            for k in 1..=(n + 2) {
                let v: Vec<Rational> = pairs
                    .iter()
                    .map(|&(i, j)| {
                        Rational::from_int((i == k) as i64 + (j == k) as i64)
                    })
                    .collect();
                assert!(m.mul_vec(&v).iter().all(Rational::is_zero));
            }
        }
    }

    #[test]
    fn single_line_form_matches_numeric_defect() {
        let arr = single_line(1, 3, 1);
        let form = prop_form(&arr).unwrap();
        for mu in [q(1, 2), q(1, 7), q(9, 11)] {
            assert_eq!(
                form.evaluate(std::slice::from_ref(&mu)).unwrap(),
                bmy_defect(&arr, std::slice::from_ref(&mu)).unwrap()
            );
        }
    }

    #[test]
    fn conic_divisor_leaves_linear_part() {
        // A class-2 divisor breaks the hyperplane cancellation:
        // defect = 12 mu - 8 mu^2 keeps its linear term.
        let arr = single_line(2, 6, 4);
        match prop_form(&arr) {
            Err(BmyError::NonHomogeneous { constant, linear }) => {
                assert!(constant.is_zero());
                assert_eq!(linear, vec![q(12, 1)]);
            }
            other => panic!("expected NonHomogeneous, got {other:?}"),
        }
    }

    #[test]
    fn permuting_divisors_conjugates_the_form() {
        let arr = complete_quadrilateral();
        let perm: [usize; 6] = [3, 0, 5, 1, 4, 2];
        let divisors: Vec<Divisor> = perm.iter().map(|&l| arr.divisors()[l].clone()).collect();
        let mut inverse = [0usize; 6];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let strata: Vec<Codim2Stratum> = arr
            .strata()
            .iter()
            .map(|s| {
                let mut mapped: Vec<usize> = s.divisors.iter().map(|&l| inverse[l]).collect();
                mapped.sort_unstable();
                Codim2Stratum {
                    kind: s.kind,
                    divisors: mapped,
                    class: s.class.clone(),
                }
            })
            .collect();
        let permuted =
            WeightedArrangement::new(2, arr.c1().clone(), arr.c2().clone(), divisors, strata)
                .unwrap();
        let base = prop_form(&arr).unwrap();
        let conj = prop_form(&permuted).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(conj.matrix[i][j], base.matrix[perm[i]][perm[j]]);
            }
        }
        assert_eq!(
            conj.kernel().unwrap().dimension,
            base.kernel().unwrap().dimension
        );
    }

    /// Random line arrangements: class-1 lines with hyperplane numbers, an
    /// arbitrary set of double points, and an optional multiple point.
    fn line_arrangement_strategy() -> impl Strategy<Value = WeightedArrangement> {
        (3usize..=6, any::<u32>(), 0usize..=3).prop_map(|(nlines, mask, extra)| {
            let divisors: Vec<Divisor> = (0..nlines)
                .map(|l| Divisor {
                    name: format!("L{l}"),
                    weight: None,
                    class: Rational::one(),
                    minus_k_dot: Rational::from_int(3),
                    self_int: Rational::one(),
                })
                .collect();
            let mut strata = Vec::new();
            let mut bit = 0;
            for a in 0..nlines {
                for b in (a + 1)..nlines {
                    if mask >> (bit % 32) & 1 == 1 {
                        strata.push(Codim2Stratum {
                            kind: IntersectionKind::Double,
                            divisors: vec![a, b],
                            class: Rational::one(),
                        });
                    }
                    bit += 1;
                }
            }
            let size = 3 + extra.min(nlines - 3);
            strata.push(Codim2Stratum {
                kind: IntersectionKind::Multiple,
                divisors: (0..size).collect(),
                class: Rational::one(),
            });
            WeightedArrangement::new(2, q(3, 1), q(3, 1), divisors, strata).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn symbolic_expansion_agrees_with_numeric_defect(
            arr in line_arrangement_strategy(),
            nums in prop::collection::vec(1i64..=24, 6),
        ) {
            // Weights below 1/4 keep every multiple point klt.
            let mu: Vec<Rational> = arr
                .divisors()
                .iter()
                .enumerate()
                .map(|(l, _)| q(nums[l % nums.len()], 100))
                .collect();
            let form = prop_form(&arr).unwrap();
            prop_assert_eq!(
                form.evaluate(&mu).unwrap(),
                bmy_defect(&arr, &mu).unwrap()
            );
        }
    }
}
