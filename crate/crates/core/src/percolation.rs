//! Site percolation below threshold as a stochastic-entropy family.
//!
//! Each site of a lattice is occupied with probability `q`. The cluster
//! containing the origin is either empty or a translate of some shape `i`
//! with `s` occupied sites and `t` perimeter sites, which happens with
//! probability `p_i = c_i q^s (1-q)^t`. With `θ = ln(q/(1-q))`,
//! `α(θ) = ln(1 + e^{-θ})` and `H(i) = t/(s+t)` one has exactly
//!
//! ```text
//! ln(p_i / c_i) = [-α(θ) - θ H(i)] (s + t)
//! ```
//!
//! so the shape distribution is an equilibrium state of a weighted Shannon
//! entropy with per-shape weights `s + t`.
//!
//! Shapes are fixed polyominoes: translates are identified, rotations are not.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::divergence::Distribution;
use crate::entropy::EntropyModel;
use crate::error::{Error, Result};
use crate::solver::ProblemInstance;

/// Largest cluster size accepted by [`enumerate_2d`].
pub const MAX_2D_SIZE: usize = 10;

pub type Cell = (i32, i32);

/// Origin clusters of one shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeClass {
    pub id: String,
    /// Occupied sites.
    pub s: u32,
    /// Perimeter sites.
    pub t: u32,
    /// Number of distinct clusters of this shape containing the origin.
    pub c: u64,
    /// Canonical cells of the shape (empty for the empty shape and for 1D).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<Cell>,
}

impl ShapeClass {
    pub fn empty() -> Self {
        Self {
            id: "empty".into(),
            s: 0,
            t: 1,
            c: 1,
            cells: Vec::new(),
        }
    }

    /// `s + t`.
    pub fn weight(&self) -> u32 {
        self.s + self.t
    }

    /// `H(i) = t / (s + t)`.
    pub fn hamiltonian(&self) -> f64 {
        self.t as f64 / self.weight() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    #[serde(rename = "1d")]
    Chain,
    #[serde(rename = "2d")]
    Square,
}

/// Segments on the line: a length-`s` segment has two perimeter sites and
/// `s` placements covering the origin.
pub fn enumerate_1d(max_size: usize) -> Result<Vec<ShapeClass>> {
    if max_size == 0 {
        return Err(Error::invalid("max_size", "must be at least 1"));
    }
    let mut out = vec![ShapeClass::empty()];
    out.extend((1..=max_size).map(|s| ShapeClass {
        id: format!("seg{s}"),
        s: s as u32,
        t: 2,
        c: s as u64,
        cells: Vec::new(),
    }));
    Ok(out)
}

/// Translate so the lexicographically smallest cell sits at the origin.
pub fn canonical(cells: &[Cell]) -> Vec<Cell> {
    let mut v = cells.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&(x0, y0)) = v.first() {
        v.iter_mut().for_each(|c| *c = (c.0 - x0, c.1 - y0));
    }
    v
}

const NEIGHBORS: [Cell; 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Number of empty sites adjacent to the shape.
pub fn perimeter(cells: &[Cell]) -> u32 {
    let occupied: HashSet<Cell> = cells.iter().copied().collect();
    let border: HashSet<Cell> = cells
        .iter()
        .flat_map(|&(x, y)| NEIGHBORS.iter().map(move |&(dx, dy)| (x + dx, y + dy)))
        .filter(|c| !occupied.contains(c))
        .collect();
    border.len() as u32
}

/// Fixed polyominoes on the square lattice up to `max_size` cells, grouped
/// by shape, preceded by the empty shape.
pub fn enumerate_2d(max_size: usize) -> Result<Vec<ShapeClass>> {
    if max_size == 0 {
        return Err(Error::invalid("max_size", "must be at least 1"));
    }
    if max_size > MAX_2D_SIZE {
        return Err(Error::CapExceeded {
            requested: max_size,
            max: MAX_2D_SIZE,
        });
    }
    let mut out = vec![ShapeClass::empty()];
    let mut level: BTreeSet<Vec<Cell>> = BTreeSet::from([vec![(0, 0)]]);
    for s in 1..=max_size {
        for (k, cells) in level.iter().enumerate() {
            // Each of the s cells can be the origin, giving s distinct clusters.
            out.push(ShapeClass {
                id: format!("s{s}-{k}"),
                s: s as u32,
                t: perimeter(cells),
                c: s as u64,
                cells: cells.clone(),
            });
        }
        if s == max_size {
            break;
        }
        let mut next = BTreeSet::new();
        for cells in &level {
            let occupied: HashSet<Cell> = cells.iter().copied().collect();
            for &(x, y) in cells {
                for (dx, dy) in NEIGHBORS {
                    let n = (x + dx, y + dy);
                    if occupied.contains(&n) {
                        continue;
                    }
                    let mut grown = cells.clone();
                    grown.push(n);
                    next.insert(canonical(&grown));
                }
            }
        }
        level = next;
    }
    Ok(out)
}

fn rotate(cells: &[Cell]) -> Vec<Cell> {
    canonical(&cells.iter().map(|&(x, y)| (-y, x)).collect::<Vec<_>>())
}

/// Merges 2D shape classes that are rotations of each other, summing `c`.
/// Shapes without cells (empty, 1D) are kept as they are.
pub fn merge_rotations(shapes: &[ShapeClass]) -> Vec<ShapeClass> {
    let mut merged: BTreeMap<Vec<Cell>, ShapeClass> = BTreeMap::new();
    let mut passthrough = Vec::new();
    for shape in shapes {
        if shape.cells.is_empty() {
            passthrough.push(shape.clone());
            continue;
        }
        let mut key = canonical(&shape.cells);
        let mut r = key.clone();
        for _ in 0..3 {
            r = rotate(&r);
            key = key.min(r.clone());
        }
        merged
            .entry(key.clone())
            .and_modify(|m| m.c += shape.c)
            .or_insert_with(|| ShapeClass {
                id: format!("r{}-{}", shape.s, shape.id),
                cells: key,
                ..shape.clone()
            });
    }
    passthrough.extend(merged.into_values());
    passthrough
}

/// `θ = ln(q / (1 - q))`.
pub fn theta_of_q(q: f64) -> f64 {
    (q / (1.0 - q)).ln()
}

/// `q = 1 / (1 + e^{-θ})`.
pub fn q_of_theta(theta: f64) -> f64 {
    1.0 / (1.0 + (-theta).exp())
}

/// `α(θ) = ln(1 + e^{-θ})`.
pub fn alpha_of_theta(theta: f64) -> f64 {
    (-theta).exp().ln_1p()
}

/// Closed-form 1D mass beyond size `max_size`: `Σ_{s>S} s q^s (1-q)²`.
pub fn chain_tail_mass(q: f64, max_size: usize) -> f64 {
    let s = max_size as f64;
    q.powi(max_size as i32 + 1) * (s + 1.0 - s * q)
}

/// A truncated shape alphabet with its probabilities at occupancy `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationInstance {
    pub shapes: Vec<ShapeClass>,
    pub q: f64,
    pub theta: f64,
    pub alpha: f64,
    /// `p_i = c_i q^s (1-q)^t`, not renormalized.
    pub probabilities: Vec<f64>,
    pub max_size: u32,
    /// `1 - Σ_i p_i`.
    pub tail_mass: f64,
}

/// Shape probabilities at occupancy `q ∈ (0, 1)`. The family identity holds
/// for every `q`; the truncated tail is only small below the threshold.
pub fn build_instance(shapes: Vec<ShapeClass>, q: f64) -> Result<PercolationInstance> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid("q", format!("must lie in (0, 1), got {q}")));
    }
    if shapes.is_empty() {
        return Err(Error::invalid("shapes", "must not be empty"));
    }
    let probabilities: Vec<f64> = shapes
        .iter()
        .map(|sh| sh.c as f64 * q.powi(sh.s as i32) * (1.0 - q).powi(sh.t as i32))
        .collect();
    let theta = theta_of_q(q);
    let max_size = shapes.iter().map(|s| s.s).max().unwrap_or(0);
    let tail_mass = 1.0 - probabilities.iter().sum::<f64>();
    Ok(PercolationInstance {
        shapes,
        q,
        theta,
        alpha: alpha_of_theta(theta),
        probabilities,
        max_size,
        tail_mass,
    })
}

/// Largest `|ln(p_i/c_i) - [-α - θ H(i)] (s + t)|` over the shapes.
pub fn verify_family_identity(instance: &PercolationInstance) -> f64 {
    instance
        .shapes
        .iter()
        .zip(&instance.probabilities)
        .map(|(sh, &p)| {
            let lhs = (p / sh.c as f64).ln();
            let rhs = (-instance.alpha - instance.theta * sh.hamiltonian()) * sh.weight() as f64;
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationEntropy {
    /// `-Σ_i p_i ln p_i / (s_i + t_i)` over the listed shapes.
    pub value: f64,
    pub tail_mass: f64,
    /// The sum omits shapes beyond the size cap.
    pub truncated: bool,
}

pub fn percolation_entropy(instance: &PercolationInstance) -> PercolationEntropy {
    let value = instance
        .shapes
        .iter()
        .zip(&instance.probabilities)
        .filter(|(_, &p)| p > 0.0)
        .map(|(sh, &p)| -p * p.ln() / sh.weight() as f64)
        .sum();
    PercolationEntropy {
        value,
        tail_mass: instance.tail_mass,
        truncated: instance.tail_mass > 0.0,
    }
}

/// The truncated alphabet as a solver problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverEmbedding {
    pub instance: ProblemInstance,
    pub theta: Vec<f64>,
    /// Shape probabilities renormalized over the truncated alphabet.
    pub target: Distribution,
}

/// Weighted Shannon model with weights `s + t` and the single Hamiltonian
/// `t / (s + t)`. Renormalizing over the truncated alphabet divides every
/// `p_i` by the retained mass `M`; it is carried by the multiplicities
/// `c_i / M`, so the renormalized distribution is the equilibrium at the
/// instance's `θ` with multiplier `α(θ)`.
pub fn percolation_as_solver_instance(instance: &PercolationInstance) -> Result<SolverEmbedding> {
    let retained: f64 = instance.probabilities.iter().sum();
    let target = Distribution::from_weights(&instance.probabilities)?;
    let weights = instance.shapes.iter().map(|s| s.weight() as f64).collect();
    let multiplicities = instance
        .shapes
        .iter()
        .map(|s| s.c as f64 / retained)
        .collect();
    let model = EntropyModel::weighted_shannon_with_multiplicities(weights, multiplicities)?;
    let hamiltonian = instance
        .shapes
        .iter()
        .map(ShapeClass::hamiltonian)
        .collect();
    let labels = instance.shapes.iter().map(|s| s.id.clone()).collect();
    Ok(SolverEmbedding {
        instance: ProblemInstance::new(model, vec![hamiltonian], Some(labels))?,
        theta: vec![instance.theta],
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::distribution_for_theta;

    fn classes(shapes: &[ShapeClass]) -> Vec<(u32, u32, u64)> {
        shapes.iter().map(|s| (s.s, s.t, s.c)).collect()
    }

    #[test]
    fn chain_enumeration() {
        assert_eq!(
            classes(&enumerate_1d(1).unwrap()),
            vec![(0, 1, 1), (1, 2, 1)]
        );
        assert_eq!(
            classes(&enumerate_1d(3).unwrap())[1..],
            [(1, 2, 1), (2, 2, 2), (3, 2, 3)]
        );
        assert!(enumerate_1d(0).is_err());
    }

    #[test]
    fn square_enumeration_small() {
        assert_eq!(
            classes(&enumerate_2d(1).unwrap()),
            vec![(0, 1, 1), (1, 4, 1)]
        );
        let two = enumerate_2d(2).unwrap();
        assert_eq!(classes(&two[2..]), vec![(2, 6, 2), (2, 6, 2)]);
        assert!(matches!(enumerate_2d(11), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn build_examples() {
        let inst = build_instance(enumerate_1d(2).unwrap(), 0.5).unwrap();
        let expect = [0.5, 0.125, 0.125];
        for (p, e) in inst.probabilities.iter().zip(expect) {
            assert!((p - e).abs() < 1e-15);
        }
        assert!((inst.tail_mass - 0.25).abs() < 1e-15);
        assert_eq!(inst.theta, 0.0);
        assert!((inst.alpha - 2f64.ln()).abs() < 1e-15);

        let inst = build_instance(enumerate_1d(3).unwrap(), 1e-9).unwrap();
        assert!((inst.probabilities[0] - 1.0).abs() < 1e-8);
        assert!(build_instance(enumerate_1d(3).unwrap(), 1.0).is_err());
    }

    #[test]
    fn theta_q_roundtrip() {
        for q in [0.01, 0.2, 0.5, 0.59, 0.9] {
            assert!((q_of_theta(theta_of_q(q)) - q).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_shape_identity() {
        for q in [0.05, 0.3, 0.7] {
            let inst = build_instance(vec![ShapeClass::empty()], q).unwrap();
            let lhs = (1.0 - q).ln();
            let rhs = -inst.alpha - inst.theta;
            assert!((lhs - rhs).abs() < 1e-14);
            assert!(verify_family_identity(&inst) < 1e-14);
        }
    }

    #[test]
    fn entropy_vanishes_as_q_goes_to_zero() {
        let inst = build_instance(enumerate_1d(5).unwrap(), 1e-12).unwrap();
        assert!(percolation_entropy(&inst).value < 1e-10);
    }

    #[test]
    fn single_shape_embedding_is_point_mass() {
        let inst = build_instance(vec![ShapeClass::empty()], 0.3).unwrap();
        let emb = percolation_as_solver_instance(&inst).unwrap();
        let r = distribution_for_theta(&emb.instance, &emb.theta).unwrap();
        assert_eq!(r.distribution.probs(), &[1.0]);
    }

    #[test]
    fn rotation_merge_keeps_counts() {
        let shapes = enumerate_2d(4).unwrap();
        let merged = merge_rotations(&shapes);
        let total =
            |v: &[ShapeClass], s: u32| v.iter().filter(|x| x.s == s).map(|x| x.c).sum::<u64>();
        for s in 0..=4 {
            assert_eq!(total(&shapes, s), total(&merged, s));
        }
        // one-sided tetrominoes: 7
        assert_eq!(merged.iter().filter(|x| x.s == 4).count(), 7);
    }
}
