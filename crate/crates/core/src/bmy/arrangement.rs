//! Weighted divisor arrangements with codimension-2 incidence data.
//!
//! An arrangement lives on an ambient Fano manifold whose classes are all
//! expressed against a fixed polarization h (the hyperplane class for the
//! projective presets): c1(X) = c1 * h, [D_l] = class_l * h, and the recorded
//! intersection numbers are already paired with h^(n-2).  Codimension-2
//! strata carry their incidence set and a class number [S] (1 for transverse
//! points of the presets).  Divisor weights are either numeric rationals or
//! symbolic (free variables of the quadratic form).
//!
//! The wire format mirrors this: {"n": 2, "c1": "3", "c2": "3", "divisors":
//! [{"name": "A", "weight": "1/2" | "symbolic"}], "intersections":
//! [{"divisors": ["A", "B"], "type": "double" | "multiple"}]}, with class,
//! minus_k_dot, self_int, and stratum class optional (hyperplane defaults).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::BmyError;
use crate::rational::Rational;

/// One divisor: name, optional numeric weight, and its intersection numbers
/// against the polarization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    pub name: String,
    /// Numeric weight mu_l in (0,1), or None when the weight is symbolic.
    pub weight: Option<Rational>,
    /// Class multiple: [D_l] = class * h.
    pub class: Rational,
    /// -K_X . D_l . h^(n-2).
    pub minus_k_dot: Rational,
    /// D_l . D_l . h^(n-2).
    pub self_int: Rational,
}

/// Supported codimension-2 singularity types: a transverse intersection of
/// exactly two divisors, or a multiple point where k >= 3 line-like divisors
/// meet pairwise transversally through one stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntersectionKind {
    Double,
    Multiple,
}

/// A codimension-2 stratum: its type, the sorted indices of the incident
/// divisors, and the class number [S] (paired with h^(n-2)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codim2Stratum {
    pub kind: IntersectionKind,
    pub divisors: Vec<usize>,
    pub class: Rational,
}

/// A weighted arrangement on an n-dimensional ambient with c1/c2 numbers,
/// divisors, and codimension-2 strata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedArrangement {
    ambient_dim: usize,
    c1: Rational,
    c2: Rational,
    divisors: Vec<Divisor>,
    strata: Vec<Codim2Stratum>,
}

impl WeightedArrangement {
    pub fn new(
        ambient_dim: usize,
        c1: Rational,
        c2: Rational,
        divisors: Vec<Divisor>,
        strata: Vec<Codim2Stratum>,
    ) -> Result<Self, BmyError> {
        if ambient_dim < 2 {
            return Err(BmyError::InvalidArrangement(
                "ambient dimension must be at least 2".into(),
            ));
        }
        let mut names = HashSet::new();
        for d in &divisors {
            if d.name.is_empty() {
                return Err(BmyError::InvalidArrangement(
                    "divisor names must be nonempty".into(),
                ));
            }
            if !names.insert(d.name.clone()) {
                return Err(BmyError::InvalidArrangement(format!(
                    "duplicate divisor name {}",
                    d.name
                )));
            }
            if let Some(w) = &d.weight {
                if !w.is_positive() || *w >= Rational::one() {
                    return Err(BmyError::WeightOutOfRange {
                        name: d.name.clone(),
                        value: w.clone(),
                    });
                }
            }
            if !d.class.is_positive() {
                return Err(BmyError::InvalidArrangement(format!(
                    "divisor {} has non-positive class",
                    d.name
                )));
            }
        }
        for (k, s) in strata.iter().enumerate() {
            let mut seen = HashSet::new();
            for &i in &s.divisors {
                if i >= divisors.len() {
                    return Err(BmyError::InvalidArrangement(format!(
                        "stratum {k} references divisor index {i} out of range"
                    )));
                }
                if !seen.insert(i) {
                    return Err(BmyError::InvalidArrangement(format!(
                        "stratum {k} repeats divisor index {i}"
                    )));
                }
            }
            if !s.divisors.windows(2).all(|w| w[0] < w[1]) {
                return Err(BmyError::InvalidArrangement(format!(
                    "stratum {k} incidence set must be sorted"
                )));
            }
            let count = s.divisors.len();
            match s.kind {
                IntersectionKind::Double if count != 2 => {
                    return Err(BmyError::InvalidArrangement(format!(
                        "stratum {k} is double but has {count} divisors"
                    )));
                }
                IntersectionKind::Multiple if count < 3 => {
                    return Err(BmyError::InvalidArrangement(format!(
                        "stratum {k} is multiple but has only {count} divisors"
                    )));
                }
                _ => {}
            }
            if !s.class.is_positive() {
                return Err(BmyError::InvalidArrangement(format!(
                    "stratum {k} has non-positive class"
                )));
            }
        }
        Ok(WeightedArrangement {
            ambient_dim,
            c1,
            c2,
            divisors,
            strata,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn c1(&self) -> &Rational {
        &self.c1
    }

    pub fn c2(&self) -> &Rational {
        &self.c2
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn strata(&self) -> &[Codim2Stratum] {
        &self.strata
    }

    /// All stored numeric weights, in divisor order; errors on the first
    /// symbolic divisor.
    pub fn stored_weights(&self) -> Result<Vec<Rational>, BmyError> {
        self.divisors
            .iter()
            .map(|d| {
                d.weight.clone().ok_or(BmyError::MissingWeight {
                    name: d.name.clone(),
                })
            })
            .collect()
    }

    /// Copy of the arrangement with the divisor weights replaced.
    pub fn with_weights(&self, mu: &[Rational]) -> Result<Self, BmyError> {
        if mu.len() != self.divisors.len() {
            return Err(BmyError::WeightCount {
                expected: self.divisors.len(),
                got: mu.len(),
            });
        }
        let mut out = self.clone();
        for (d, w) in out.divisors.iter_mut().zip(mu) {
            if !w.is_positive() || *w >= Rational::one() {
                return Err(BmyError::WeightOutOfRange {
                    name: d.name.clone(),
                    value: w.clone(),
                });
            }
            d.weight = Some(w.clone());
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self, BmyError> {
        let raw: RawArrangement = serde_json::from_str(text)
            .map_err(|e| BmyError::InvalidArrangement(format!("JSON parse error: {e}")))?;
        raw.build()
    }
}

#[derive(Deserialize)]
struct RawArrangement {
    n: usize,
    c1: Option<Rational>,
    c2: Option<Rational>,
    divisors: Vec<RawDivisor>,
    #[serde(default)]
    intersections: Vec<RawIntersection>,
}

#[derive(Deserialize)]
struct RawDivisor {
    name: String,
    weight: String,
    class: Option<Rational>,
    minus_k_dot: Option<Rational>,
    self_int: Option<Rational>,
}

#[derive(Deserialize)]
struct RawIntersection {
    divisors: Vec<String>,
    #[serde(rename = "type")]
    kind: IntersectionKind,
    class: Option<Rational>,
}

impl RawArrangement {
    fn build(self) -> Result<WeightedArrangement, BmyError> {
        let n = self.n;
        // Hyperplane-arrangement defaults: c1 = n+1, c2 = n(n+1)/2, lines of
        // class 1 with -K.D = n+1 and D^2 = 1, strata of class 1.
        let c1 = self
            .c1
            .unwrap_or_else(|| Rational::from_int(n as i64 + 1));
        let c2 = self.c2.unwrap_or_else(|| {
            Rational::from_int((n as i64 + 1) * n as i64) / Rational::from_int(2)
        });
        let divisors: Vec<Divisor> = self
            .divisors
            .into_iter()
            .map(|d| {
                let weight = if d.weight == "symbolic" {
                    None
                } else {
                    let parsed = d.weight.parse::<Rational>().map_err(|e| {
                        BmyError::InvalidArrangement(format!(
                            "divisor {}: bad weight: {e}",
                            d.name
                        ))
                    })?;
                    Some(parsed)
                };
                Ok(Divisor {
                    name: d.name,
                    weight,
                    class: d.class.unwrap_or_else(Rational::one),
                    minus_k_dot: d
                        .minus_k_dot
                        .unwrap_or_else(|| Rational::from_int(n as i64 + 1)),
                    self_int: d.self_int.unwrap_or_else(Rational::one),
                })
            })
            .collect::<Result<_, BmyError>>()?;
        let strata = self
            .intersections
            .into_iter()
            .map(|s| {
                let mut indices = Vec::new();
                for name in &s.divisors {
                    let idx = divisors
                        .iter()
                        .position(|d| &d.name == name)
                        .ok_or_else(|| {
                            BmyError::InvalidArrangement(format!(
                                "intersection references unknown divisor {name}"
                            ))
                        })?;
                    indices.push(idx);
                }
                indices.sort_unstable();
                Ok(Codim2Stratum {
                    kind: s.kind,
                    divisors: indices,
                    class: s.class.unwrap_or_else(Rational::one),
                })
            })
            .collect::<Result<Vec<_>, BmyError>>()?;
        WeightedArrangement::new(n, c1, c2, divisors, strata)
    }
}

/// Index pairs {i < j} of {1, ..., count} in lexicographic order; this is the
/// divisor order used by the pair-collision presets.
pub fn index_pairs(count: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 1..=count {
        for j in (i + 1)..=count {
            pairs.push((i, j));
        }
    }
    pairs
}

fn pair_name(i: usize, j: usize, count: usize) -> String {
    if count <= 9 {
        format!("H{i}{j}")
    } else {
        format!("H{i}-{j}")
    }
}

/// The Deligne-Mostow arrangement on CP^n: one hyperplane H_ij per pair of
/// the n+2 point labels, with the three types of codimension-2 strata a
/// generic point configuration produces: triples H_ij, H_ik, H_jk through
/// each label triple, and transverse doubles H_ij, H_kl for disjoint pairs.
/// All divisors are symbolic.
pub fn dm_arrangement(n: usize) -> WeightedArrangement {
    assert!(n >= 2, "DM arrangement needs ambient dimension at least 2");
    let labels = n + 2;
    let pairs = index_pairs(labels);
    let pair_index = |a: usize, b: usize| -> usize {
        pairs
            .iter()
            .position(|&(i, j)| (i, j) == (a.min(b), a.max(b)))
            .expect("pair is in range")
    };
    let divisors: Vec<Divisor> = pairs
        .iter()
        .map(|&(i, j)| Divisor {
            name: pair_name(i, j, labels),
            weight: None,
            class: Rational::one(),
            minus_k_dot: Rational::from_int(n as i64 + 1),
            self_int: Rational::one(),
        })
        .collect();
    let mut strata = Vec::new();
    for i in 1..=labels {
        for j in (i + 1)..=labels {
            for k in (j + 1)..=labels {
                let mut incidence = vec![pair_index(i, j), pair_index(i, k), pair_index(j, k)];
                incidence.sort_unstable();
                strata.push(Codim2Stratum {
                    kind: IntersectionKind::Multiple,
                    divisors: incidence,
                    class: Rational::one(),
                });
                for l in (k + 1)..=labels {
                    for (a, b, c, d) in [(i, j, k, l), (i, k, j, l), (i, l, j, k)] {
                        let mut incidence = vec![pair_index(a, b), pair_index(c, d)];
                        incidence.sort_unstable();
                        strata.push(Codim2Stratum {
                            kind: IntersectionKind::Double,
                            divisors: incidence,
                            class: Rational::one(),
                        });
                    }
                }
            }
        }
    }
    let c1 = Rational::from_int(n as i64 + 1);
    let c2 = Rational::from_int((n as i64 + 1) * n as i64) / Rational::from_int(2);
    WeightedArrangement::new(n, c1, c2, divisors, strata).expect("preset data is valid")
}

/// Weights induced on the pair divisors by point weights: mu_ij = mu_i + mu_j,
/// in the same order as `dm_arrangement(n).divisors()`.
pub fn dm_induced_weights(n: usize, mu: &[Rational]) -> Result<Vec<Rational>, BmyError> {
    if mu.len() != n + 2 {
        return Err(BmyError::WeightCount {
            expected: n + 2,
            got: mu.len(),
        });
    }
    Ok(index_pairs(n + 2)
        .iter()
        .map(|&(i, j)| &mu[i - 1] + &mu[j - 1])
        .collect())
}

/// The complete quadrilateral: the six lines through the four general points
/// of the plane.  Identical combinatorics to the CP^2 pair arrangement (four
/// triple points, three transverse diagonal points).
pub fn complete_quadrilateral() -> WeightedArrangement {
    dm_arrangement(2)
}

/// Three generic lines in the plane: three transverse double points, no
/// multiple points.
pub fn triangle() -> WeightedArrangement {
    let divisors = ["A", "B", "C"]
        .iter()
        .map(|&name| Divisor {
            name: name.into(),
            weight: None,
            class: Rational::one(),
            minus_k_dot: Rational::from_int(3),
            self_int: Rational::one(),
        })
        .collect();
    let strata = [(0usize, 1usize), (0, 2), (1, 2)]
        .iter()
        .map(|&(a, b)| Codim2Stratum {
            kind: IntersectionKind::Double,
            divisors: vec![a, b],
            class: Rational::one(),
        })
        .collect();
    WeightedArrangement::new(
        2,
        Rational::from_int(3),
        Rational::from_int(3),
        divisors,
        strata,
    )
    .expect("preset data is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn dm_preset_counts() {
        let arr = dm_arrangement(2);
        assert_eq!(arr.divisors().len(), 6);
        let multiples = arr
            .strata()
            .iter()
            .filter(|s| s.kind == IntersectionKind::Multiple)
            .count();
        let doubles = arr
            .strata()
            .iter()
            .filter(|s| s.kind == IntersectionKind::Double)
            .count();
        assert_eq!(multiples, 4);
        assert_eq!(doubles, 3);

        let arr = dm_arrangement(3);
        assert_eq!(arr.divisors().len(), 10);
        let multiples = arr
            .strata()
            .iter()
            .filter(|s| s.kind == IntersectionKind::Multiple)
            .count();
        let doubles = arr
            .strata()
            .iter()
            .filter(|s| s.kind == IntersectionKind::Double)
            .count();
        assert_eq!(multiples, 10); // C(5,3)
        assert_eq!(doubles, 15); // 3 C(5,4)
    }

    #[test]
    fn quadrilateral_matches_pair_arrangement() {
        assert_eq!(complete_quadrilateral(), dm_arrangement(2));
    }

    #[test]
    fn induced_weights_follow_divisor_order() {
        let mu = [q(1, 10), q(1, 5), q(3, 10), q(2, 5)];
        let induced = dm_induced_weights(2, &mu).unwrap();
        let pairs = index_pairs(4);
        assert_eq!(induced.len(), pairs.len());
        assert_eq!(pairs[0], (1, 2));
        assert_eq!(induced[0], q(3, 10));
        assert_eq!(*pairs.last().unwrap(), (3, 4));
        assert_eq!(*induced.last().unwrap(), q(7, 10));
        assert!(dm_induced_weights(2, &mu[..3]).is_err());
    }

    #[test]
    fn json_parse_with_defaults() {
        let text = r#"{
            "n": 2,
            "divisors": [
                {"name": "A", "weight": "1/2"},
                {"name": "B", "weight": "symbolic"},
                {"name": "C", "weight": "1/3"}
            ],
            "intersections": [
                {"divisors": ["A", "B"], "type": "double"},
                {"divisors": ["A", "B", "C"], "type": "multiple"}
            ]
        }"#;
        let arr = WeightedArrangement::from_json(text).unwrap();
        assert_eq!(arr.ambient_dim(), 2);
        assert_eq!(*arr.c1(), q(3, 1));
        assert_eq!(*arr.c2(), q(3, 1));
        assert_eq!(arr.divisors()[0].weight, Some(q(1, 2)));
        assert_eq!(arr.divisors()[1].weight, None);
        assert_eq!(arr.divisors()[0].minus_k_dot, q(3, 1));
        assert_eq!(arr.strata()[0].kind, IntersectionKind::Double);
        assert_eq!(arr.strata()[1].divisors, vec![0, 1, 2]);
        assert!(arr.stored_weights().is_err());
    }

    #[test]
    fn json_rejects_structural_errors() {
        let unknown = r#"{"n": 2, "divisors": [{"name": "A", "weight": "1/2"}],
            "intersections": [{"divisors": ["A", "X"], "type": "double"}]}"#;
        assert!(WeightedArrangement::from_json(unknown).is_err());

        let bad_double = r#"{"n": 2, "divisors": [
            {"name": "A", "weight": "1/2"}, {"name": "B", "weight": "1/2"},
            {"name": "C", "weight": "1/2"}],
            "intersections": [{"divisors": ["A", "B", "C"], "type": "double"}]}"#;
        assert!(WeightedArrangement::from_json(bad_double).is_err());

        let bad_multiple = r#"{"n": 2, "divisors": [
            {"name": "A", "weight": "1/2"}, {"name": "B", "weight": "1/2"}],
            "intersections": [{"divisors": ["A", "B"], "type": "multiple"}]}"#;
        assert!(WeightedArrangement::from_json(bad_multiple).is_err());

        let bad_weight = r#"{"n": 2, "divisors": [{"name": "A", "weight": "3/2"}]}"#;
        assert!(matches!(
            WeightedArrangement::from_json(bad_weight),
            Err(BmyError::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn with_weights_replaces_in_order() {
        let arr = triangle();
        let weighted = arr.with_weights(&[q(1, 2), q(1, 3), q(1, 5)]).unwrap();
        assert_eq!(
            weighted.stored_weights().unwrap(),
            vec![q(1, 2), q(1, 3), q(1, 5)]
        );
        assert!(arr.with_weights(&[q(1, 2)]).is_err());
        assert!(arr.with_weights(&[q(1, 2), q(1, 3), q(7, 5)]).is_err());
    }
}
