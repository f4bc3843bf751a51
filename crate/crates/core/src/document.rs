//! JSON documents exchanged with the command line.

use serde::{Deserialize, Serialize};

use crate::divergence::Distribution;
use crate::entropy::{EntropyModel, ModelSpec};
use crate::error::{Error, Result};
use crate::solver::{Diagnostics, ProblemInstance, SolveResult};

/// `{"model": ..., "hamiltonians": [[...], ...], "labels": [...]?}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub model: ModelSpec,
    pub hamiltonians: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl InstanceDoc {
    pub fn from_instance(instance: &ProblemInstance) -> Self {
        Self {
            model: instance.model().to_spec(),
            hamiltonians: instance.hamiltonians().to_vec(),
            labels: Some(instance.labels().to_vec()),
        }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let model = EntropyModel::try_from(&self.model).map_err(|e| prefix("model", e))?;
        ProblemInstance::new(model, self.hamiltonians.clone(), self.labels.clone())
    }
}

fn prefix(root: &str, e: Error) -> Error {
    match e {
        Error::Invalid { path, message } => Error::Invalid {
            path: format!("{root}.{path}"),
            message,
        },
        other => other,
    }
}

/// Serialized [`SolveResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub theta: Vec<f64>,
    pub alpha: f64,
    pub cutoff: Vec<usize>,
    pub probabilities: Vec<f64>,
    pub massieu: f64,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

impl From<&SolveResult> for ResultDoc {
    fn from(r: &SolveResult) -> Self {
        Self {
            theta: r.theta.clone(),
            alpha: r.alpha,
            cutoff: r.cutoff_set.clone(),
            probabilities: r.distribution.probs().to_vec(),
            massieu: r.massieu,
            diagnostics: r.diagnostics.clone(),
        }
    }
}

impl TryFrom<&ResultDoc> for SolveResult {
    type Error = Error;

    fn try_from(doc: &ResultDoc) -> Result<Self> {
        Ok(SolveResult {
            theta: doc.theta.clone(),
            alpha: doc.alpha,
            cutoff_set: doc.cutoff.clone(),
            distribution: Distribution::new(doc.probabilities.clone())?,
            massieu: doc.massieu,
            diagnostics: doc.diagnostics.clone(),
        })
    }
}
