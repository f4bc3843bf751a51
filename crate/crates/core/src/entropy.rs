//! Entropy functions on a finite alphabet.
//!
//! An entropy model is described by three per-symbol functions on `[0, 1]`:
//!
//! * `h(u)`, strictly concave with `h(0) = 0`,
//! * `f(u) = -h'(u)`, strictly increasing, possibly unbounded below at `u = 0`,
//! * `φ(u) = 1 / f'(u)`, strictly positive.
//!
//! The entropy of a distribution is `I(p) = Σ_a h_a(p_a)`. Whether `f(0)` is
//! finite decides whether an equilibrium distribution may put exactly zero
//! mass on a symbol.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|q - 1|` below this routes Tsallis models to the natural-log branch.
pub const Q_SHANNON_BAND: f64 = 1e-8;

/// Value of `f` at `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Finite(f64),
    NegInfinity,
}

impl Boundary {
    pub fn is_finite(self) -> bool {
        matches!(self, Boundary::Finite(_))
    }

    /// The boundary as an extended real.
    pub fn value(self) -> f64 {
        match self {
            Boundary::Finite(v) => v,
            Boundary::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

/// Outcome of inverting `f_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inverse {
    Value(f64),
    /// `y < f_a(0)`: the symbol is cut off.
    BelowRange,
    /// `y > f_a(1)`: would need `u > 1`.
    AboveRange,
}

impl Inverse {
    pub fn value(self) -> Option<f64> {
        match self {
            Inverse::Value(u) => Some(u),
            _ => None,
        }
    }
}

/// Parameter of the q-deformed logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QLogParams {
    pub q: f64,
}

/// `ln_q(u) = (u^{1-q} - 1) / (1 - q)`, with the natural log at `q = 1`.
pub fn q_log(params: QLogParams, u: f64) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Domain {
            what: "q-logarithm",
            value: u,
        });
    }
    let q = params.q;
    if (q - 1.0).abs() < Q_SHANNON_BAND {
        return Ok(u.ln());
    }
    Ok(((1.0 - q) * u.ln()).exp_m1() / (1.0 - q))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Shannon,
    /// `h(u) = u ln_q(1/u)`.
    Tsallis {
        q: f64,
    },
    /// `h(u) = -u ln_q(u)`, i.e. [`Family::Tsallis`] with `q` replaced by `2 - q`.
    /// Its escort is proportional to `u^q`.
    TsallisEscort {
        q: f64,
    },
    /// Per-symbol `f_a(u) = ln(u / m_a) / w_a` with positive weights `w_a`
    /// and multiplicities `m_a` (default 1).
    WeightedShannon {
        weights: Vec<f64>,
        multiplicities: Vec<f64>,
    },
}

/// Closed-form kernel of one symbol.
#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// `f(u) = ln(u / m) / w`.
    Log { w: f64, m: f64 },
    /// `f(u) = (q u^{q-1} - 1) / (q - 1)`.
    Power { q: f64 },
}

impl Kernel {
    fn h(self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        match self {
            Kernel::Log { w, m } => u * (1.0 - (u / m).ln()) / w,
            Kernel::Power { q } => -u * ((q - 1.0) * u.ln()).exp_m1() / (q - 1.0),
        }
    }

    fn f(self, u: f64) -> f64 {
        match self {
            Kernel::Log { w, m } => (u / m).ln() / w,
            Kernel::Power { q } => {
                if u == 0.0 {
                    return self.f_at_zero().value();
                }
                1.0 + q * ((q - 1.0) * u.ln()).exp_m1() / (q - 1.0)
            }
        }
    }

    fn f_at_zero(self) -> Boundary {
        match self {
            Kernel::Log { .. } => Boundary::NegInfinity,
            Kernel::Power { q } if q > 1.0 => Boundary::Finite(-1.0 / (q - 1.0)),
            Kernel::Power { .. } => Boundary::NegInfinity,
        }
    }

    fn f_at_one(self) -> f64 {
        match self {
            Kernel::Log { w, m } => -m.ln() / w,
            Kernel::Power { .. } => 1.0,
        }
    }

    fn phi(self, u: f64) -> f64 {
        match self {
            Kernel::Log { w, .. } => w * u,
            Kernel::Power { q } => u.powf(2.0 - q) / q,
        }
    }

    fn inverse(self, y: f64) -> Inverse {
        if y > self.f_at_one() {
            return Inverse::AboveRange;
        }
        match self {
            Kernel::Log { w, m } => {
                let u = m * (w * y).exp();
                if u == 0.0 {
                    // Underflow; f(0) is -inf so the symbol is never cut off.
                    Inverse::Value(0.0)
                } else {
                    Inverse::Value(u.min(1.0))
                }
            }
            Kernel::Power { q } => {
                if let Boundary::Finite(f0) = self.f_at_zero() {
                    if y < f0 {
                        return Inverse::BelowRange;
                    }
                }
                let base = (q - 1.0) * y;
                if base <= -1.0 {
                    return Inverse::Value(0.0);
                }
                let u = ((base.ln_1p() - q.ln()) / (q - 1.0)).exp();
                Inverse::Value(u.min(1.0))
            }
        }
    }
}

/// An entropy function `I(p) = λ Σ_a h_a(p_a)` with scale `λ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyModel {
    family: Family,
    scale: f64,
}

impl EntropyModel {
    pub fn shannon() -> Self {
        Self {
            family: Family::Shannon,
            scale: 1.0,
        }
    }

    pub fn tsallis(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::invalid(
                "q",
                format!("must be a positive number, got {q}"),
            ));
        }
        Ok(Self {
            family: Family::Tsallis { q },
            scale: 1.0,
        })
    }

    pub fn tsallis_escort(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 2.0) {
            return Err(Error::invalid("q", format!("must lie in (0, 2), got {q}")));
        }
        Ok(Self {
            family: Family::TsallisEscort { q },
            scale: 1.0,
        })
    }

    pub fn weighted_shannon(weights: Vec<f64>) -> Result<Self> {
        let m = vec![1.0; weights.len()];
        Self::weighted_shannon_with_multiplicities(weights, m)
    }

    pub fn weighted_shannon_with_multiplicities(
        weights: Vec<f64>,
        multiplicities: Vec<f64>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weights", "must not be empty"));
        }
        check_positive("weights", &weights)?;
        if multiplicities.len() != weights.len() {
            return Err(Error::invalid(
                "multiplicities",
                format!(
                    "expected {} entries, got {}",
                    weights.len(),
                    multiplicities.len()
                ),
            ));
        }
        check_positive("multiplicities", &multiplicities)?;
        Ok(Self {
            family: Family::WeightedShannon {
                weights,
                multiplicities,
            },
            scale: 1.0,
        })
    }

    /// The same family with entropy multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(
                "scale",
                format!("must be positive, got {lambda}"),
            ));
        }
        Ok(Self {
            family: self.family.clone(),
            scale: self.scale * lambda,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Alphabet size fixed by the model, if it is per-symbol.
    pub fn alphabet_size(&self) -> Option<usize> {
        match &self.family {
            Family::WeightedShannon { weights, .. } => Some(weights.len()),
            _ => None,
        }
    }

    pub fn is_per_symbol(&self) -> bool {
        self.alphabet_size().is_some()
    }

    fn kernel(&self, a: usize) -> Result<Kernel> {
        let power = |q: f64| {
            if (q - 1.0).abs() < Q_SHANNON_BAND {
                Kernel::Log {
                    w: 1.0,
                    m: (-1.0f64).exp(),
                }
            } else {
                Kernel::Power { q }
            }
        };
        Ok(match &self.family {
            Family::Shannon => power(1.0),
            Family::Tsallis { q } => power(*q),
            Family::TsallisEscort { q } => power(2.0 - q),
            Family::WeightedShannon {
                weights,
                multiplicities,
            } => {
                let size = weights.len();
                if a >= size {
                    return Err(Error::UnknownSymbol { index: a, size });
                }
                Kernel::Log {
                    w: weights[a],
                    m: multiplicities[a],
                }
            }
        })
    }

    /// `h_a(u)` for `u ∈ [0, 1]`.
    pub fn eval_h(&self, a: usize, u: f64) -> Result<f64> {
        check_unit("h", u)?;
        Ok(self.scale * self.kernel(a)?.h(u))
    }

    /// `f_a(u) = -h_a'(u)`; at `u = 0` only when `f_a(0)` is finite.
    pub fn eval_f(&self, a: usize, u: f64) -> Result<f64> {
        check_unit("f", u)?;
        let k = self.kernel(a)?;
        if u == 0.0 && !k.f_at_zero().is_finite() {
            return Err(Error::Domain {
                what: "f",
                value: u,
            });
        }
        Ok(self.scale * k.f(u))
    }

    /// Solves `f_a(u) = y` for `u ∈ [0, 1]`.
    pub fn eval_f_inverse(&self, a: usize, y: f64) -> Result<Inverse> {
        if y.is_nan() {
            return Err(Error::Domain {
                what: "f inverse",
                value: y,
            });
        }
        Ok(self.kernel(a)?.inverse(y / self.scale))
    }

    /// `φ_a(u) = 1 / f_a'(u)` for `u ∈ (0, 1]`.
    pub fn eval_phi(&self, a: usize, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain {
                what: "phi",
                value: u,
            });
        }
        Ok(self.kernel(a)?.phi(u) / self.scale)
    }

    /// `f_a(0)` of symbol `a`.
    pub fn f_at_zero_of(&self, a: usize) -> Result<Boundary> {
        Ok(match self.kernel(a)?.f_at_zero() {
            Boundary::Finite(v) => Boundary::Finite(self.scale * v),
            b => b,
        })
    }

    /// `f(0)` for the model. For per-symbol models the value of the first
    /// symbol is reported; every built-in per-symbol family is unbounded below.
    pub fn f_at_zero(&self) -> Boundary {
        self.f_at_zero_of(0).unwrap_or(Boundary::NegInfinity)
    }

    /// `f_a(1)`.
    pub fn f_at_one(&self, a: usize) -> Result<f64> {
        Ok(self.scale * self.kernel(a)?.f_at_one())
    }

    /// Serializable description of this model.
    pub fn to_spec(&self) -> ModelSpec {
        let mut spec = ModelSpec {
            family: FamilyName::Shannon,
            q: None,
            weights: None,
            multiplicities: None,
            scale: (self.scale != 1.0).then_some(self.scale),
        };
        match &self.family {
            Family::Shannon => {}
            Family::Tsallis { q } => {
                spec.family = FamilyName::Tsallis;
                spec.q = Some(*q);
            }
            Family::TsallisEscort { q } => {
                spec.family = FamilyName::TsallisEscort;
                spec.q = Some(*q);
            }
            Family::WeightedShannon {
                weights,
                multiplicities,
            } => {
                spec.family = FamilyName::WeightedShannon;
                spec.weights = Some(weights.clone());
                if multiplicities.iter().any(|&m| m != 1.0) {
                    spec.multiplicities = Some(multiplicities.clone());
                }
            }
        }
        spec
    }
}

fn check_unit(what: &'static str, u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain { what, value: u })
    }
}

fn check_positive(path: &str, xs: &[f64]) -> Result<()> {
    for (i, &x) in xs.iter().enumerate() {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid(
                format!("{path}[{i}]"),
                format!("must be a positive number, got {x}"),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Shannon,
    Tsallis,
    TsallisEscort,
    WeightedShannon,
}

/// JSON form of an entropy model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl TryFrom<&ModelSpec> for EntropyModel {
    type Error = Error;

    fn try_from(spec: &ModelSpec) -> Result<Self> {
        let need_q = || {
            spec.q
                .ok_or_else(|| Error::invalid("q", "required for this family"))
        };
        let model = match spec.family {
            FamilyName::Shannon => EntropyModel::shannon(),
            FamilyName::Tsallis => EntropyModel::tsallis(need_q()?)?,
            FamilyName::TsallisEscort => EntropyModel::tsallis_escort(need_q()?)?,
            FamilyName::WeightedShannon => {
                let w = spec
                    .weights
                    .clone()
                    .ok_or_else(|| Error::invalid("weights", "required for weighted_shannon"))?;
                match &spec.multiplicities {
                    Some(m) => EntropyModel::weighted_shannon_with_multiplicities(w, m.clone())?,
                    None => EntropyModel::weighted_shannon(w)?,
                }
            }
        };
        match spec.scale {
            Some(s) => model.scaled(s),
            None => Ok(model),
        }
    }
}
