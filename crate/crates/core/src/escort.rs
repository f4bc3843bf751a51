//! Escort distributions and the generalized Fisher information.
//!
//! The escort of an equilibrium `p_θ` is `P_a = φ_a(p_a) / z` on the support
//! and zero on the cutoff set, with `z = Σ'_a φ_a(p_a)` summed over the
//! support only. Scores are `X_{j,a} = (∂p_a/∂θ_j) / P_a`, with the derivative
//! taken by central differences over full solves. On a finite alphabet the
//! Fisher matrix `I = ⟨P, X_i X_j⟩` satisfies `I = z g = z² σ`.

use serde::{Deserialize, Serialize};

use crate::divergence::Distribution;
use crate::error::{Error, Result};
use crate::numerics::max_abs_diff;
use crate::solver::{distribution_for_theta, ProblemInstance, SolveResult, Stencil};
use crate::thermo::metric_tensor;

type Matrix = Vec<Vec<f64>>;

/// Escort distribution and its normalizer `z`.
pub fn escort(instance: &ProblemInstance, result: &SolveResult) -> Result<(Distribution, f64)> {
    let model = instance.model();
    let p = result.distribution.probs();
    let mut weights = vec![0.0; p.len()];
    for (a, &pa) in p.iter().enumerate() {
        if pa > 0.0 {
            weights[a] = model.eval_phi(a, pa)?;
        }
    }
    let z: f64 = weights.iter().sum();
    if !(z > 0.0) {
        return Err(Error::DegenerateEscort);
    }
    let probs = weights.iter().map(|w| w / z).collect();
    Ok((Distribution::new(probs)?, z))
}

/// Finite-difference `∂α/∂θ_j` plus `⟨P_θ, H_j⟩` for every `j`.
pub fn alpha_gradient_check(
    instance: &ProblemInstance,
    theta: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let stencil = Stencil::new(instance, theta, step)?;
    stencil.require_smooth()?;
    let (big_p, _) = escort(instance, &stencil.center)?;
    Ok(stencil
        .legs
        .iter()
        .zip(instance.hamiltonians())
        .map(|((m, p, h), hj)| (p.alpha - m.alpha) / (2.0 * h) + big_p.expect(hj))
        .collect())
}

/// Scores `X_{j,a}` from finite differences of `p_θ`; zero on the cutoff set.
pub fn scores(instance: &ProblemInstance, result: &SolveResult, step: f64) -> Result<Matrix> {
    let stencil = Stencil::new(instance, &result.theta, step)?;
    stencil.require_smooth()?;
    let (big_p, _) = escort(instance, &stencil.center)?;
    Ok(stencil
        .legs
        .iter()
        .map(|(m, p, h)| {
            big_p
                .probs()
                .iter()
                .enumerate()
                .map(|(a, &pa_escort)| {
                    if pa_escort > 0.0 {
                        let dp =
                            (p.distribution.probs()[a] - m.distribution.probs()[a]) / (2.0 * h);
                        dp / pa_escort
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect())
}

/// Scores from `X_{j,a} = z (⟨P, H_j⟩ - H_j(a))` on the support.
pub fn closed_form_scores(instance: &ProblemInstance, result: &SolveResult) -> Result<Matrix> {
    let (big_p, z) = escort(instance, result)?;
    Ok(instance
        .hamiltonians()
        .iter()
        .map(|hj| {
            let mean = big_p.expect(hj);
            big_p
                .probs()
                .iter()
                .zip(hj)
                .map(|(&pa, &h)| if pa > 0.0 { z * (mean - h) } else { 0.0 })
                .collect()
        })
        .collect())
}

fn second_moment(big_p: &Distribution, x: &Matrix) -> Matrix {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = big_p
                .probs()
                .iter()
                .enumerate()
                .map(|(a, pa)| pa * x[i][a] * x[j][a])
                .sum();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// `I_ij = ⟨P, X_i X_j⟩` with finite-difference scores.
pub fn fisher_matrix(
    instance: &ProblemInstance,
    result: &SolveResult,
    step: f64,
) -> Result<Matrix> {
    let x = scores(instance, result, step)?;
    let (big_p, _) = escort(instance, result)?;
    Ok(second_moment(&big_p, &x))
}

/// `σ_ij = ⟨P, H_i H_j⟩ - ⟨P, H_i⟩⟨P, H_j⟩`.
pub fn escort_covariance(instance: &ProblemInstance, big_p: &Distribution) -> Matrix {
    let hs = instance.hamiltonians();
    let means: Vec<f64> = hs.iter().map(|h| big_p.expect(h)).collect();
    let centered: Matrix = hs
        .iter()
        .zip(&means)
        .map(|(h, m)| h.iter().map(|x| x - m).collect())
        .collect();
    second_moment(big_p, &centered)
}

/// Escort geometry at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub theta: Vec<f64>,
    pub z: f64,
    pub escort: Distribution,
    /// `scores[j][a]`.
    pub scores: Matrix,
    pub fisher: Matrix,
    pub covariance: Matrix,
    pub metric: Matrix,
    /// max-entry `|I - z g|`.
    pub residual_zg: f64,
    /// max-entry `|I - z² σ|`.
    pub residual_z2sigma: f64,
}

pub fn geometry_report(
    instance: &ProblemInstance,
    theta: &[f64],
    step: f64,
) -> Result<GeometryReport> {
    let result = distribution_for_theta(instance, theta)?;
    let (big_p, z) = escort(instance, &result)?;
    let x = scores(instance, &result, step)?;
    let fisher = second_moment(&big_p, &x);
    let covariance = escort_covariance(instance, &big_p);
    let metric = metric_tensor(instance, theta, step)?.metric;
    let zg: Matrix = metric
        .iter()
        .map(|row| row.iter().map(|g| z * g).collect())
        .collect();
    let z2s: Matrix = covariance
        .iter()
        .map(|row| row.iter().map(|s| z * z * s).collect())
        .collect();
    Ok(GeometryReport {
        theta: theta.to_vec(),
        z,
        escort: big_p,
        scores: x,
        residual_zg: max_abs_diff(&fisher, &zg),
        residual_z2sigma: max_abs_diff(&fisher, &z2s),
        fisher,
        covariance,
        metric,
    })
}

/// `(residual_zg, residual_z2sigma)` at `θ`.
pub fn prop4_check(instance: &ProblemInstance, theta: &[f64], step: f64) -> Result<(f64, f64)> {
    let r = geometry_report(instance, theta, step)?;
    Ok((r.residual_zg, r.residual_z2sigma))
}

fn quadratic(m: &Matrix, u: &[f64], v: &[f64]) -> f64 {
    m.iter()
        .zip(u)
        .map(|(row, ui)| ui * row.iter().zip(v).map(|(x, vj)| x * vj).sum::<f64>())
        .sum()
}

/// `(uᵀσu)(vᵀIv) - (uᵀgv)²`; nonnegative, and zero at `u = v` on an
/// equilibrium family.
pub fn cramer_rao_gap(report: &GeometryReport, u: &[f64], v: &[f64]) -> f64 {
    let lhs = quadratic(&report.covariance, u, u) * quadratic(&report.fisher, v, v);
    let cross = quadratic(&report.metric, u, v);
    lhs - cross * cross
}
