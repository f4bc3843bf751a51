//! Maximum-entropy and variational-principle solver for generalized entropy
//! functions on finite alphabets.
//!
//! * [`entropy`]: entropy families (Shannon, Tsallis, weighted Shannon).
//! * [`divergence`]: entropy, Bregman divergence, f-divergence.
//! * [`solver`]: equilibrium distribution for given parameters, the inverse
//!   problem for given energies, and equilibrium certificates.
//! * [`thermo`]: Massieu function, thermodynamic entropy, metric tensor.
//! * [`escort`]: escort distributions and generalized Fisher information.
//! * [`percolation`]: site percolation as a stochastic-entropy family.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod divergence;
pub mod document;
pub mod entropy;
pub mod error;
pub mod escort;
pub mod numerics;
pub mod percolation;
pub mod solver;
pub mod thermo;

pub use divergence::{bregman, entropy, f_divergence, Bregman, Distribution, ReferenceMeasure};
pub use entropy::{q_log, Boundary, EntropyModel, Family, Inverse, ModelSpec, QLogParams};
pub use error::{Error, Result};
pub use escort::{cramer_rao_gap, escort, geometry_report, GeometryReport};
pub use solver::{
    distribution_for_theta, solve_for_energies, verify_equilibrium, EnergyTarget, ProblemInstance,
    SolveResult, VerificationReport,
};
pub use thermo::{massieu, metric_tensor, thermo_report, ThermoReport};
