//! Request and report documents.

use genmaxent::document::{InstanceDoc, ResultDoc};
use genmaxent::escort::GeometryReport;
use genmaxent::percolation::{Lattice, PercolationEntropy};
use genmaxent::thermo::ThermoReport;
use genmaxent::VerificationReport;
use serde::{Deserialize, Serialize};

/// Input of `solve`: exactly one of `theta` and `energies`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    pub instance: InstanceDoc,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub energies: Option<Vec<f64>>,
}

/// Input of `thermo` and `fisher`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRequest {
    pub instance: InstanceDoc,
    pub theta: Vec<f64>,
}

/// `steps` evenly spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Axis {
    pub fn point(&self, k: usize) -> f64 {
        if self.steps == 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRequest {
    pub instance: InstanceDoc,
    /// One axis per Hamiltonian.
    pub grid: Vec<Axis>,
}

/// Input of `verify`. Every JSON report written by this tool carries an
/// `instance` and either a `result` or a `theta`, so reports can be fed back
/// unchanged; other fields are ignored.
#[derive(Debug, Clone, Deserialize)]
pub struct VerifyRequest {
    pub instance: InstanceDoc,
    #[serde(default)]
    pub result: Option<ResultDoc>,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub energies: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub instance: InstanceDoc,
    pub result: ResultDoc,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermoOutput {
    pub instance: InstanceDoc,
    pub theta: Vec<f64>,
    pub report: ThermoReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FisherOutput {
    pub instance: InstanceDoc,
    pub theta: Vec<f64>,
    pub report: GeometryReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutput {
    pub instance: InstanceDoc,
    pub result: ResultDoc,
    pub verification: VerificationReport,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShapeRow {
    pub id: String,
    pub s: u32,
    pub t: u32,
    pub c: u64,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PercolationOutput {
    pub lattice: Lattice,
    pub max_size: usize,
    pub merged_rotations: bool,
    pub q: f64,
    /// Single component, so the report doubles as a `verify` input.
    pub theta: Vec<f64>,
    pub alpha: f64,
    pub tail_mass: f64,
    pub identity_residual: f64,
    pub entropy: PercolationEntropy,
    /// Sup distance between the solver equilibrium and the renormalized shape
    /// probabilities.
    pub embedding_residual: f64,
    pub shapes: Vec<ShapeRow>,
    pub instance: InstanceDoc,
}
