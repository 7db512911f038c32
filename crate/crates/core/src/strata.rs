//! Boundary strata, cusps, and tangent-cone descriptors of the completed
//! moduli space attached to a weight system.
//!
//! A partition P of the point labels describes a collision pattern.  P is a
//! boundary stratum when every block has weight sum < 1 (and some block is a
//! genuine collision); it is a cusp when it has exactly two blocks of weight
//! sum 1 each.  The tangent cone at a stratum splits into one metric-cone
//! factor per colliding block, of density (1 − s_α)^{|B_α|−1}, times a flat
//! factor of dimension |P| − 3.

use crate::rational::Rational;
use crate::weights::WeightSystem;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StratumError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("block {{{}}} has weight sum {sum} >= 1, not a stable collision", block.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))]
    NotStable { block: Vec<usize>, sum: Rational },
}

/// A set partition of {1..N} in canonical form: blocks internally sorted and
/// listed in increasing order of their least element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, n_points: usize) -> Result<Self, StratumError> {
        let mut seen = vec![false; n_points];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(StratumError::InvalidPartition("empty block".into()));
            }
            b.sort_unstable();
            for &i in &b {
                if i == 0 || i > n_points {
                    return Err(StratumError::InvalidPartition(format!(
                        "index {i} outside 1..={n_points}"
                    )));
                }
                if seen[i - 1] {
                    return Err(StratumError::InvalidPartition(format!(
                        "index {i} appears twice"
                    )));
                }
                seen[i - 1] = true;
            }
            canon.push(b);
        }
        if !seen.iter().all(|&s| s) {
            return Err(StratumError::InvalidPartition(
                "blocks do not cover all indices".into(),
            ));
        }
        canon.sort();
        Ok(Partition { blocks: canon })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_points(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StratumKind {
    Interior,
    StableStratum,
    CuspPoint,
}

/// Local model of a cusp point: smooth iff one colliding block is a pair,
/// otherwise a cone over a Segre variety of bidegree (p, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuspModel {
    SmoothPoint,
    SegreCone { p: usize, q: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumDescriptor {
    pub partition: Partition,
    pub codim: usize,
    pub kind: StratumKind,
    pub cusp_model: Option<CuspModel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentConeFactor {
    pub block: Vec<usize>,
    pub density: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentConeDescriptor {
    pub factors: Vec<TangentConeFactor>,
    pub flat_factor_dim: usize,
    pub total_density: Rational,
}

/// All stable boundary strata of codimension ≤ `max_codim`, in lexicographic
/// order of their canonical partitions.  Codimension of a partition P is
/// (n+3) − |P|; the interior (all singletons) is excluded.
///
/// Enumeration walks the assignment tree index by index and prunes on two
/// monotone quantities: a block sum can only grow, and the final codimension
/// is at least (indices placed) − (blocks opened).
pub fn enumerate_strata(w: &WeightSystem, max_codim: usize) -> Vec<StratumDescriptor> {
    let one = Rational::one();
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut sums: Vec<Rational> = Vec::new();

    fn recurse(
        w: &WeightSystem,
        next: usize,
        blocks: &mut Vec<Vec<usize>>,
        sums: &mut Vec<Rational>,
        max_codim: usize,
        one: &Rational,
        out: &mut Vec<StratumDescriptor>,
    ) {
        let n_points = w.len();
        if next > n_points {
            let codim = n_points - blocks.len();
            if codim >= 1 && codim <= max_codim && blocks.len() >= 3 {
                let partition = Partition::new(blocks.clone(), n_points).expect("walk is exact");
                out.push(StratumDescriptor {
                    partition,
                    codim,
                    kind: StratumKind::StableStratum,
                    cusp_model: None,
                });
            }
            return;
        }
        // placed = next - 1 indices so far; codim already forced is placed - |blocks|
        if (next - 1) - blocks.len() > max_codim {
            return;
        }
        let mu = w.mu(next).clone();
        for b in 0..blocks.len() {
            let grown = &sums[b] + &mu;
            if grown < *one {
                blocks[b].push(next);
                let old = std::mem::replace(&mut sums[b], grown);
                recurse(w, next + 1, blocks, sums, max_codim, one, out);
                sums[b] = old;
                blocks[b].pop();
            }
        }
        blocks.push(vec![next]);
        sums.push(mu);
        recurse(w, next + 1, blocks, sums, max_codim, one, out);
        sums.pop();
        blocks.pop();
    }

    recurse(w, 1, &mut blocks, &mut sums, max_codim, &one, &mut out);
    out.sort_by(|a, b| a.partition.cmp(&b.partition));
    out
}

/// All cusp points: unordered two-block partitions with both weight sums
/// exactly 1.  The model is a smooth point iff some block is a pair.
pub fn enumerate_cusps(w: &WeightSystem) -> Vec<StratumDescriptor> {
    let n_points = w.len();
    let one = Rational::one();
    let mut out = Vec::new();
    // every split is determined by the block containing index 1
    for mask in 0u64..(1 << (n_points - 1)) {
        let mut b1 = vec![1usize];
        let mut b2 = Vec::new();
        for i in 2..=n_points {
            if mask & (1 << (i - 2)) != 0 {
                b1.push(i);
            } else {
                b2.push(i);
            }
        }
        if b2.is_empty() {
            continue;
        }
        if w.block_sum(&b1) != one {
            continue;
        }
        // total is 2, so the complement sums to 1 automatically
        let model = if b1.len() == 2 || b2.len() == 2 {
            CuspModel::SmoothPoint
        } else {
            CuspModel::SegreCone {
                p: b1.len() - 2,
                q: b2.len() - 2,
            }
        };
        let partition = Partition::new(vec![b1, b2], n_points).expect("split is exact");
        out.push(StratumDescriptor {
            partition,
            codim: n_points - 2,
            kind: StratumKind::CuspPoint,
            cusp_model: Some(model),
        });
    }
    out.sort_by(|a, b| a.partition.cmp(&b.partition));
    out
}

/// Tangent cone at the stratum of a stable partition: one factor of density
/// (1 − s_α)^{|B_α|−1} per block of size ≥ 2, and ℂ^{|P|−3} flat directions.
pub fn tangent_cone(
    w: &WeightSystem,
    partition: &Partition,
) -> Result<TangentConeDescriptor, StratumError> {
    assert_eq!(partition.n_points(), w.len(), "partition size mismatch");
    let one = Rational::one();
    let mut factors = Vec::new();
    let mut total = Rational::one();
    for block in partition.blocks() {
        let s = w.block_sum(block);
        if s >= one {
            return Err(StratumError::NotStable {
                block: block.clone(),
                sum: s,
            });
        }
        if block.len() >= 2 {
            let density = (&one - &s).pow((block.len() - 1) as i32);
            total = &total * &density;
            factors.push(TangentConeFactor {
                block: block.clone(),
                density,
            });
        }
    }
    Ok(TangentConeDescriptor {
        factors,
        flat_factor_dim: partition.num_blocks() - 3,
        total_density: total,
    })
}

/// Tangent cone along the intersection of two pair-collision divisors: a
/// product of two 2-dimensional cones times ℂ^{n−2}.
pub fn codim2_cone(
    w: &WeightSystem,
    pair1: (usize, usize),
    pair2: (usize, usize),
) -> Result<TangentConeDescriptor, StratumError> {
    let mut blocks = vec![vec![pair1.0, pair1.1], vec![pair2.0, pair2.1]];
    for i in 1..=w.len() {
        if ![pair1.0, pair1.1, pair2.0, pair2.1].contains(&i) {
            blocks.push(vec![i]);
        }
    }
    let partition = Partition::new(blocks, w.len())?;
    tangent_cone(w, &partition)
}
