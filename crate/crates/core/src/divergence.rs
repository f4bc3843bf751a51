//! Generalized entropy, Bregman divergence and f-divergence.

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyModel;
use crate::error::{Error, Result};

/// Tolerance on `Σ p_a = 1` accepted by [`Distribution::new`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("probabilities", "must not be empty"));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::invalid(
                    format!("probabilities[{i}]"),
                    format!("must be a nonnegative number, got {p}"),
                ));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(
                "probabilities",
                format!("must sum to 1, sum is {total}"),
            ));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights to a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::invalid("weights", "must have a positive finite sum"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `true` where `p_a > 0`.
    pub fn support_mask(&self) -> Vec<bool> {
        self.probs.iter().map(|&p| p > 0.0).collect()
    }

    /// `⟨p, x⟩`.
    pub fn expect(&self, x: &[f64]) -> f64 {
        self.probs.iter().zip(x).map(|(p, v)| p * v).sum()
    }

    /// Largest `|p_a - q_a|`.
    pub fn sup_distance(&self, other: &Distribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Distribution::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

/// Positive reference weights `c_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMeasure {
    weights: Vec<f64>,
}

impl ReferenceMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for (i, &c) in weights.iter().enumerate() {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::invalid(
                    format!("reference[{i}]"),
                    format!("must be positive, got {c}"),
                ));
            }
        }
        Ok(Self { weights })
    }

    pub fn counting(n: usize) -> Self {
        Self {
            weights: vec![1.0; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn check_alphabet(model: &EntropyModel, n: usize) -> Result<()> {
    match model.alphabet_size() {
        Some(size) if size != n => Err(Error::invalid(
            "probabilities",
            format!("model has {size} symbols, distribution has {n}"),
        )),
        _ => Ok(()),
    }
}

/// `I(p) = Σ_a h_a(p_a)`.
pub fn entropy(model: &EntropyModel, p: &Distribution) -> Result<f64> {
    check_alphabet(model, p.len())?;
    p.probs
        .iter()
        .enumerate()
        .map(|(a, &u)| model.eval_h(a, u))
        .sum()
}

/// Outcome of a Bregman divergence evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bregman {
    Value(f64),
    /// Some `q_a = 0` with `p_a > 0` while `f_a(0) = -∞`.
    Undefined,
}

impl Bregman {
    pub fn value(self) -> Option<f64> {
        match self {
            Bregman::Value(v) => Some(v),
            Bregman::Undefined => None,
        }
    }
}

/// `D(p||q) = I(q) - I(p) - Σ_a (p_a - q_a) f_a(q_a)`.
pub fn bregman(model: &EntropyModel, p: &Distribution, q: &Distribution) -> Result<Bregman> {
    if p.len() != q.len() {
        return Err(Error::invalid("q", "alphabet sizes differ"));
    }
    check_alphabet(model, p.len())?;
    let mut linear = 0.0;
    for (a, (&pa, &qa)) in p.probs.iter().zip(&q.probs).enumerate() {
        if pa == qa {
            continue;
        }
        if qa == 0.0 && !model.f_at_zero_of(a)?.is_finite() {
            return Ok(Bregman::Undefined);
        }
        linear += (pa - qa) * model.eval_f(a, qa)?;
    }
    Ok(Bregman::Value(
        entropy(model, q)? - entropy(model, p)? - linear,
    ))
}

/// `Σ_a c_a F(p_a / c_a)` for a convex `F`.
///
/// A non-finite value of `F` is reported as a domain error.
pub fn f_divergence<F>(convex_f: F, p: &Distribution, c: &ReferenceMeasure) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if p.len() != c.weights.len() {
        return Err(Error::invalid("reference", "alphabet sizes differ"));
    }
    let mut total = 0.0;
    for (&pa, &ca) in p.probs.iter().zip(&c.weights) {
        let x = pa / ca;
        let v = convex_f(x);
        if !v.is_finite() {
            return Err(Error::Domain {
                what: "convex function",
                value: x,
            });
        }
        total += ca * v;
    }
    Ok(total)
}
