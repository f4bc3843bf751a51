//! Massieu function, thermodynamic entropy and the metric tensor.
//!
//! `Φ(θ)` is always evaluated from a single equilibrium solve as
//! `I(p_θ) - Σ_j θ_j ⟨p_θ, H_j⟩`. `S(U)` is the entropy of the equilibrium
//! state whose energies equal `U`; it is obtained by solving the inverse
//! problem, which makes the Legendre identity `S = Φ + θ·U` a real check.

use serde::{Deserialize, Serialize};

use crate::divergence::entropy;
use crate::error::{Error, Result};
use crate::numerics::{dot, max_abs_diff};
use crate::solver::{
    distribution_for_theta, solve_for_energies_with, EnergySolverOptions, EnergyTarget,
    ProblemInstance, SolveResult, Stencil,
};

/// Default relative finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

pub fn massieu(instance: &ProblemInstance, theta: &[f64]) -> Result<f64> {
    Ok(distribution_for_theta(instance, theta)?.massieu)
}

/// `S(U) = I(p_θ)` at the `θ` whose energies are `U`.
pub fn thermodynamic_entropy(instance: &ProblemInstance, target: &EnergyTarget) -> Result<f64> {
    let r = solve_for_energies_with(instance, target, &EnergySolverOptions::default())?;
    entropy(instance.model(), &r.distribution)
}

/// Central finite difference of `Φ`; matches `-⟨p_θ, H_j⟩`.
pub fn massieu_gradient(instance: &ProblemInstance, theta: &[f64], step: f64) -> Result<Vec<f64>> {
    let stencil = Stencil::new(instance, theta, step)?;
    stencil.require_smooth()?;
    Ok(stencil
        .legs
        .iter()
        .map(|(m, p, h)| (p.massieu - m.massieu) / (2.0 * h))
        .collect())
}

/// The metric tensor computed along two routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTensor {
    /// `g_ij = -∂⟨p_θ, H_j⟩/∂θ_i`, symmetrized.
    pub metric: Vec<Vec<f64>>,
    /// Finite-difference Hessian of `Φ`.
    pub hessian: Vec<Vec<f64>>,
    /// Largest entrywise difference between the two.
    pub discrepancy: f64,
}

impl MetricTensor {
    /// Agreement bound `max(1e-5, 100 step²)`.
    pub fn tolerance(step: f64) -> f64 {
        (100.0 * step * step).max(1e-5)
    }
}

pub fn metric_tensor(instance: &ProblemInstance, theta: &[f64], step: f64) -> Result<MetricTensor> {
    let stencil = Stencil::new(instance, theta, step)?;
    stencil.require_smooth()?;
    let n = theta.len();
    let jac = stencil.energy_jacobian(instance);
    let metric: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| -0.5 * (jac[i][j] + jac[j][i])).collect())
        .collect();

    let center = &stencil.center;
    let mut hessian = vec![vec![0.0; n]; n];
    for i in 0..n {
        let (m, p, h) = &stencil.legs[i];
        hessian[i][i] = (p.massieu - 2.0 * center.massieu + m.massieu) / (h * h);
        for j in 0..i {
            let hj = stencil.legs[j].2;
            let corner = |si: f64, sj: f64| -> Result<SolveResult> {
                let mut t = theta.to_vec();
                t[i] += si * h;
                t[j] += sj * hj;
                let r = distribution_for_theta(instance, &t)?;
                if r.cutoff_set != center.cutoff_set {
                    return Err(Error::NonSmooth {
                        theta: theta.to_vec(),
                    });
                }
                Ok(r)
            };
            let pp = corner(1.0, 1.0)?.massieu;
            let pm = corner(1.0, -1.0)?.massieu;
            let mp = corner(-1.0, 1.0)?.massieu;
            let mm = corner(-1.0, -1.0)?.massieu;
            let v = (pp - pm - mp + mm) / (4.0 * h * hj);
            hessian[i][j] = v;
            hessian[j][i] = v;
        }
    }
    let discrepancy = max_abs_diff(&metric, &hessian);
    Ok(MetricTensor {
        metric,
        hessian,
        discrepancy,
    })
}

/// Finite-difference `∂S/∂U_j` minus the solved `θ_j`.
pub fn entropy_derivative_check(
    instance: &ProblemInstance,
    target: &EnergyTarget,
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::invalid("step", "must be positive"));
    }
    let center = solve_for_energies_with(instance, target, &EnergySolverOptions::default())?;
    let warm = EnergySolverOptions {
        initial_theta: Some(center.theta.clone()),
        ..Default::default()
    };
    let mut residuals = Vec::with_capacity(target.0.len());
    for j in 0..target.0.len() {
        let h = step * target.0[j].abs().max(1.0);
        let leg = |sign: f64| -> Result<f64> {
            let mut u = target.0.clone();
            u[j] += sign * h;
            let r = solve_for_energies_with(instance, &EnergyTarget(u), &warm)?;
            if r.cutoff_set != center.cutoff_set {
                return Err(Error::NonSmooth {
                    theta: center.theta.clone(),
                });
            }
            entropy(instance.model(), &r.distribution)
        };
        let derivative = (leg(1.0)? - leg(-1.0)?) / (2.0 * h);
        residuals.push(derivative - center.theta[j]);
    }
    Ok(residuals)
}

/// Thermodynamic quantities at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoReport {
    pub theta: Vec<f64>,
    pub massieu: f64,
    pub energies: Vec<f64>,
    /// `S(U)` from the inverse solve at `U = ⟨p_θ, H⟩`.
    pub entropy_value: f64,
    /// `None` when the stencil crosses a cutoff change.
    pub massieu_gradient: Option<Vec<f64>>,
    pub metric: Option<Vec<Vec<f64>>>,
    /// `|S - (Φ + θ·U)|`.
    pub duality_gap: f64,
    pub non_smooth: bool,
}

pub fn thermo_report(instance: &ProblemInstance, theta: &[f64], step: f64) -> Result<ThermoReport> {
    let r = distribution_for_theta(instance, theta)?;
    let energies = instance.energies(&r.distribution);
    let entropy_value = thermodynamic_entropy(instance, &EnergyTarget(energies.clone()))?;
    let duality_gap = (entropy_value - (r.massieu + dot(theta, &energies))).abs();
    let (gradient, metric, non_smooth) = match (
        massieu_gradient(instance, theta, step),
        metric_tensor(instance, theta, step),
    ) {
        (Ok(g), Ok(m)) => (Some(g), Some(m.metric), false),
        (Err(Error::NonSmooth { .. }), _) | (_, Err(Error::NonSmooth { .. })) => (None, None, true),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(ThermoReport {
        theta: theta.to_vec(),
        massieu: r.massieu,
        energies,
        entropy_value,
        massieu_gradient: gradient,
        metric,
        duality_gap,
        non_smooth,
    })
}
