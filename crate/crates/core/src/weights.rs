//! Weight systems for configurations of n+3 points on the line.
//!
//! A weight system is a list of rationals μ_1..μ_{n+3}, each strictly between
//! 0 and 1, summing to exactly 2.  Index sets are classified by their weight
//! sum: below 1 the collision is stable, exactly 1 it is polystable (a cusp
//! direction), above 1 it is unstable.  All comparisons are exact.
//!
//! Indices are 1-based in every public interface.

use crate::rational::Rational;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("need at least 4 weights, got {len}")]
    TooFewPoints { len: usize },
    #[error("weight #{index} = {value} is outside (0,1)")]
    WeightOutOfRange { index: usize, value: Rational },
    #[error("weights sum to {sum}, expected 2")]
    SumNotTwo { sum: Rational },
}

/// All invariant violations found in a candidate weight list, not just the first.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid weight system: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidWeights(pub Vec<WeightError>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSystem {
    mu: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsetClass {
    StableCollision,
    Polystable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubsetError {
    #[error("empty index subset")]
    EmptySubset,
    #[error("index {index} outside 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("index {index} repeated in subset")]
    DuplicateIndex { index: usize },
}

/// Checks every invariant and returns the weight system, or the full list of
/// violations.
pub fn validate(raw: &[Rational]) -> Result<WeightSystem, InvalidWeights> {
    let mut errors = Vec::new();
    if raw.len() < 4 {
        errors.push(WeightError::TooFewPoints { len: raw.len() });
    }
    for (i, m) in raw.iter().enumerate() {
        if !(m.is_positive() && *m < Rational::one()) {
            errors.push(WeightError::WeightOutOfRange {
                index: i + 1,
                value: m.clone(),
            });
        }
    }
    let sum: Rational = raw.iter().sum();
    if sum != Rational::from_int(2) {
        errors.push(WeightError::SumNotTwo { sum });
    }
    if errors.is_empty() {
        Ok(WeightSystem { mu: raw.to_vec() })
    } else {
        Err(InvalidWeights(errors))
    }
}

impl WeightSystem {
    /// Number of points, N = n + 3.
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Moduli dimension n = N − 3.
    pub fn n(&self) -> usize {
        self.mu.len() - 3
    }

    /// Weight of point `index` (1-based).
    pub fn mu(&self, index: usize) -> &Rational {
        &self.mu[index - 1]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.mu
    }

    /// Exact weight sum over a 1-based index subset.
    pub fn block_sum(&self, block: &[usize]) -> Rational {
        block.iter().map(|&i| self.mu(i)).sum()
    }

    /// Applies a permutation given as `perm[old-1] = new position` is easy to
    /// get wrong; here `perm` lists the old 1-based indices in their new
    /// order, i.e. the image weights are `mu[perm[0]], mu[perm[1]], …`.
    pub fn permuted(&self, perm: &[usize]) -> WeightSystem {
        assert_eq!(perm.len(), self.mu.len());
        WeightSystem {
            mu: perm.iter().map(|&i| self.mu(i).clone()).collect(),
        }
    }
}

/// Classifies a 1-based index subset by its exact weight sum.
pub fn subset_class(w: &WeightSystem, block: &[usize]) -> Result<SubsetClass, SubsetError> {
    if block.is_empty() {
        return Err(SubsetError::EmptySubset);
    }
    let mut seen = vec![false; w.len()];
    for &i in block {
        if i == 0 || i > w.len() {
            return Err(SubsetError::IndexOutOfRange {
                index: i,
                len: w.len(),
            });
        }
        if seen[i - 1] {
            return Err(SubsetError::DuplicateIndex { index: i });
        }
        seen[i - 1] = true;
    }
    let sum = w.block_sum(block);
    let one = Rational::one();
    Ok(if sum < one {
        SubsetClass::StableCollision
    } else if sum == one {
        SubsetClass::Polystable
    } else {
        SubsetClass::Unstable
    })
}

/// Cone angles 2πβ_j at marked points, β_j ∈ (0,1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleVector {
    pub beta: Vec<Rational>,
}

impl AngleVector {
    pub fn new(beta: Vec<Rational>) -> Self {
        assert!(
            beta.iter()
                .all(|b| b.is_positive() && *b < Rational::one()),
            "cone angles must lie in (0,1)"
        );
        AngleVector { beta }
    }
}

/// Spherical existence predicate for cone angles on the 2-sphere:
/// Σ(1−β_j) < 2 and each deficiency is smaller than the sum of the others.
pub fn troyanov_spherical(angles: &AngleVector) -> bool {
    let defic: Vec<Rational> = angles
        .beta
        .iter()
        .map(|b| Rational::one() - b)
        .collect();
    let total: Rational = defic.iter().sum();
    if total >= Rational::from_int(2) {
        return false;
    }
    defic.iter().all(|d| {
        let others = &total - d;
        *d < others
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn qs(items: &[&str]) -> Vec<Rational> {
        items.iter().map(|s| q(s)).collect()
    }

    fn six_thirds() -> WeightSystem {
        validate(&qs(&["1/3"; 6])).unwrap()
    }

    #[test]
    fn six_thirds_is_valid_with_n_3() {
        let w = six_thirds();
        assert_eq!(w.n(), 3);
        assert_eq!(w.len(), 6);
    }

    #[test]
    fn four_halves_is_valid_with_n_1() {
        let w = validate(&qs(&["1/2"; 4])).unwrap();
        assert_eq!(w.n(), 1);
    }

    #[test]
    fn boundary_rejection_reports_both_errors() {
        let err = validate(&qs(&["1", "1/2", "1/2"])).unwrap_err();
        assert!(err
            .0
            .iter()
            .any(|e| matches!(e, WeightError::TooFewPoints { len: 3 })));
        assert!(err
            .0
            .iter()
            .any(|e| matches!(e, WeightError::WeightOutOfRange { index: 1, .. })));
        // sum is exactly 2, so no SumNotTwo
        assert!(!err.0.iter().any(|e| matches!(e, WeightError::SumNotTwo { .. })));
    }

    #[test]
    fn wrong_sum_is_reported() {
        let err = validate(&qs(&["1/3", "1/3", "1/3", "1/3"])).unwrap_err();
        assert_eq!(
            err.0,
            vec![WeightError::SumNotTwo { sum: q("4/3") }]
        );
    }

    #[test]
    fn validate_is_idempotent() {
        let w = six_thirds();
        assert_eq!(validate(w.weights()).unwrap(), w);
    }

    #[test]
    fn subset_class_examples() {
        let w = six_thirds();
        assert_eq!(
            subset_class(&w, &[1, 2, 3]).unwrap(),
            SubsetClass::Polystable
        );
        assert_eq!(
            subset_class(&w, &[1, 2]).unwrap(),
            SubsetClass::StableCollision
        );
        assert_eq!(
            subset_class(&w, &[1, 2, 3, 4, 5, 6]).unwrap(),
            SubsetClass::Unstable
        );
        assert_eq!(subset_class(&w, &[]).unwrap_err(), SubsetError::EmptySubset);
        assert_eq!(
            subset_class(&w, &[7]).unwrap_err(),
            SubsetError::IndexOutOfRange { index: 7, len: 6 }
        );
    }

    #[test]
    fn polystable_iff_complement_polystable() {
        let w = validate(&qs(&["3/10", "5/10", "55/100", "65/100"])).unwrap();
        for block in [vec![1usize], vec![1, 2], vec![2, 3], vec![1, 2, 3]] {
            let comp: Vec<usize> = (1..=4).filter(|i| !block.contains(i)).collect();
            let a = subset_class(&w, &block).unwrap() == SubsetClass::Polystable;
            let b = subset_class(&w, &comp).unwrap() == SubsetClass::Polystable;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn subset_class_is_permutation_equivariant() {
        let w = validate(&qs(&["3/10", "5/10", "55/100", "65/100"])).unwrap();
        let perm = [3usize, 1, 4, 2];
        let wp = w.permuted(&perm);
        // block {1,2} in the permuted system picks old indices {3,1}
        assert_eq!(
            subset_class(&wp, &[1, 2]).unwrap(),
            subset_class(&w, &[3, 1]).unwrap()
        );
        assert_eq!(
            subset_class(&wp, &[2, 4]).unwrap(),
            subset_class(&w, &[1, 2]).unwrap()
        );
    }

    #[test]
    fn troyanov_examples() {
        let yes = AngleVector::new(qs(&["2/3", "2/3", "2/3"]));
        assert!(troyanov_spherical(&yes));
        let no = AngleVector::new(qs(&["1/2", "3/4"]));
        assert!(!troyanov_spherical(&no));
        let single = AngleVector::new(qs(&["9/10"]));
        assert!(!troyanov_spherical(&single));
    }
}
