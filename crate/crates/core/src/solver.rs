//! Equilibrium distributions of the variational principle.
//!
//! For parameters `θ` the equilibrium `p_θ` maximizes `I(p) - Σ_j θ_j ⟨p, H_j⟩`
//! over the simplex. It is characterized by a multiplier `α` with
//!
//! * `f_a(p_a) = -α - Σ_j θ_j H_j(a)` on the support, and
//! * `f_a(0) ≥ -α - Σ_j θ_j H_j(a)` on the cutoff set `A₀ = {a : p_a = 0}`.
//!
//! At fixed `α` every `p_a(α)` is obtained pointwise by inverting `f_a`, and
//! the total mass `Σ_a p_a(α)` is continuous and nonincreasing in `α`, so the
//! multiplier is found by bracketing and bisection. The inverse problem
//! (energies to parameters) minimizes the convex function `Φ(θ) + θ·U`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use serde::{Deserialize, Serialize};

use crate::divergence::{entropy, Distribution};
use crate::entropy::{Boundary, EntropyModel, Inverse};
use crate::error::{Error, Result};
use crate::numerics::dot;

/// Stationarity tolerance used by [`verify_equilibrium`].
pub const STATIONARITY_TOL: f64 = 1e-9;
/// Tolerance on the objective comparison in [`verify_equilibrium`].
pub const OBJECTIVE_TOL: f64 = 1e-10;

/// Alphabet, Hamiltonians `H_j(a)` and entropy model.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    labels: Vec<String>,
    hamiltonians: Vec<Vec<f64>>,
    model: EntropyModel,
}

impl ProblemInstance {
    /// `hamiltonians[j][a]` is `H_j(a)`.
    pub fn new(
        model: EntropyModel,
        hamiltonians: Vec<Vec<f64>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if hamiltonians.is_empty() {
            return Err(Error::invalid(
                "hamiltonians",
                "at least one Hamiltonian is required",
            ));
        }
        let size = hamiltonians[0].len();
        if size == 0 {
            return Err(Error::invalid(
                "hamiltonians[0]",
                "alphabet must not be empty",
            ));
        }
        for (j, row) in hamiltonians.iter().enumerate() {
            if row.len() != size {
                return Err(Error::invalid(
                    format!("hamiltonians[{j}]"),
                    format!("expected {size} entries, got {}", row.len()),
                ));
            }
            if let Some(a) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::invalid(
                    format!("hamiltonians[{j}][{a}]"),
                    "must be finite",
                ));
            }
        }
        if let Some(m) = model.alphabet_size() {
            if m != size {
                return Err(Error::invalid(
                    "model.weights",
                    format!("model has {m} symbols, Hamiltonians have {size}"),
                ));
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != size {
                    return Err(Error::invalid(
                        "labels",
                        format!("expected {size} labels, got {}", l.len()),
                    ));
                }
                for (i, s) in l.iter().enumerate() {
                    let ok = !s.is_empty()
                        && s.chars()
                            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
                    if !ok {
                        return Err(Error::invalid(
                            format!("labels[{i}]"),
                            "labels must match [A-Za-z0-9_-]+",
                        ));
                    }
                }
                l
            }
            None => (0..size).map(|a| format!("a{a}")).collect(),
        };
        Ok(Self {
            labels,
            hamiltonians,
            model,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.labels.len()
    }

    /// Number of Hamiltonians `n`.
    pub fn dimension(&self) -> usize {
        self.hamiltonians.len()
    }

    pub fn hamiltonians(&self) -> &[Vec<f64>] {
        &self.hamiltonians
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn model(&self) -> &EntropyModel {
        &self.model
    }

    /// Same alphabet and Hamiltonians with another entropy model.
    pub fn with_model(&self, model: EntropyModel) -> Result<Self> {
        Self::new(model, self.hamiltonians.clone(), Some(self.labels.clone()))
    }

    /// `⟨p, H_j⟩` for every `j`.
    pub fn energies(&self, p: &Distribution) -> Vec<f64> {
        self.hamiltonians.iter().map(|h| p.expect(h)).collect()
    }

    /// `Σ_j θ_j H_j(a)`.
    pub fn energy_of(&self, theta: &[f64], a: usize) -> f64 {
        self.hamiltonians
            .iter()
            .zip(theta)
            .map(|(h, t)| t * h[a])
            .sum()
    }

    /// `I(p) - Σ_j θ_j ⟨p, H_j⟩` for a raw probability vector.
    pub fn objective(&self, p: &[f64], theta: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (a, &u) in p.iter().enumerate() {
            total += self.model.eval_h(a, u)? - u * self.energy_of(theta, a);
        }
        Ok(total)
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dimension() {
            return Err(Error::invalid(
                "theta",
                format!(
                    "expected {} components, got {}",
                    self.dimension(),
                    theta.len()
                ),
            ));
        }
        if let Some(j) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::invalid(format!("theta[{j}]"), "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub alpha_iterations: usize,
    /// `|Σ_a p_a(α) - 1|` before the final renormalization.
    pub alpha_residual: f64,
    pub outer_iterations: usize,
    pub converged: bool,
    /// `(α, Σ_a p_a(α))` at every bisection step, in the shifted frame,
    /// when requested through [`SolverOptions::record_trace`].
    #[serde(skip)]
    pub trace: Vec<(f64, f64)>,
}

/// An equilibrium state.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub theta: Vec<f64>,
    /// Multiplier with respect to the Hamiltonians as given (not shifted).
    pub alpha: f64,
    /// Symbols with zero probability, ascending.
    pub cutoff_set: Vec<usize>,
    pub distribution: Distribution,
    /// `Φ(θ) = I(p_θ) - Σ_j θ_j ⟨p_θ, H_j⟩`.
    pub massieu: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Starting bracket for the multiplier in the shifted frame.
    pub initial_bracket: Option<(f64, f64)>,
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            initial_bracket: None,
            record_trace: false,
        }
    }
}

/// Equilibrium distribution `p_θ` with default options.
pub fn distribution_for_theta(instance: &ProblemInstance, theta: &[f64]) -> Result<SolveResult> {
    distribution_for_theta_with(instance, theta, &SolverOptions::default())
}

pub fn distribution_for_theta_with(
    instance: &ProblemInstance,
    theta: &[f64],
    options: &SolverOptions,
) -> Result<SolveResult> {
    instance.check_theta(theta)?;
    let model = instance.model();
    let size = instance.alphabet_size();

    // Shift every Hamiltonian so its minimum is 0; α is mapped back at the end.
    let minima: Vec<f64> = instance
        .hamiltonians
        .iter()
        .map(|h| h.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let offset = dot(theta, &minima);
    let shifted: Vec<f64> = (0..size)
        .map(|a| {
            instance
                .hamiltonians
                .iter()
                .zip(theta)
                .zip(&minima)
                .map(|((h, t), m)| t * (h[a] - m))
                .sum()
        })
        .collect();

    let point = |alpha: f64, a: usize| -> Result<f64> {
        Ok(match model.eval_f_inverse(a, -alpha - shifted[a])? {
            Inverse::Value(u) => u,
            Inverse::BelowRange => 0.0,
            Inverse::AboveRange => 1.0,
        })
    };
    let mass = |alpha: f64| -> Result<f64> { (0..size).map(|a| point(alpha, a)).sum() };

    let (mut lo, mut hi) = match options.initial_bracket {
        Some((a, b)) if a < b => (a, b),
        Some((a, b)) => (b.min(a) - 1.0, a.max(b) + 1.0),
        None => {
            let mut f_max: f64 = 0.0;
            for a in 0..size {
                f_max = f_max.max(model.f_at_one(a)?.abs());
            }
            let e_max = shifted.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            let b = f_max + e_max + 1.0;
            (-b, b)
        }
    };

    let mut expansions = 0;
    while mass(lo)? < 1.0 {
        let w = hi - lo;
        lo -= w;
        expansions += 1;
        if expansions > 200 || !lo.is_finite() {
            return Err(Error::NoSolution(
                "total mass stays below 1 for every multiplier".into(),
            ));
        }
    }
    while mass(hi)? >= 1.0 {
        let w = hi - lo;
        lo = hi;
        hi += w;
        expansions += 1;
        if expansions > 400 || !hi.is_finite() {
            return Err(Error::NoSolution(
                "total mass stays above 1 for every multiplier".into(),
            ));
        }
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut settled = false;
    while iterations < options.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            settled = true;
            break;
        }
        iterations += 1;
        let m = mass(mid)?;
        if options.record_trace {
            trace.push((mid, m));
        }
        if m >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let width = hi - lo;
    if !settled && width > 1e-13 * hi.abs().max(1.0) {
        return Err(Error::NonConvergence {
            iterations,
            residual: width,
        });
    }

    // Σ p(hi) < 1, so no symbol is clamped at the upper edge.
    let mut probs: Vec<f64> = (0..size).map(|a| point(hi, a)).collect::<Result<_>>()?;
    let total: f64 = probs.iter().sum();
    let alpha_residual = (total - 1.0).abs();
    if !(alpha_residual < 1e-9) {
        return Err(Error::NonConvergence {
            iterations,
            residual: alpha_residual,
        });
    }
    probs.iter_mut().for_each(|p| *p /= total);

    let mut cutoff_set = Vec::new();
    for (a, &p) in probs.iter().enumerate() {
        if p == 0.0 && model.f_at_zero_of(a)?.is_finite() {
            cutoff_set.push(a);
        }
    }
    let distribution = Distribution::new(probs)?;
    let massieu = entropy(model, &distribution)? - dot(theta, &instance.energies(&distribution));

    Ok(SolveResult {
        theta: theta.to_vec(),
        alpha: hi - offset,
        cutoff_set,
        distribution,
        massieu,
        diagnostics: Diagnostics {
            alpha_iterations: iterations,
            alpha_residual,
            outer_iterations: 0,
            converged: true,
            trace,
        },
    })
}

/// Solves at `θ ± h_i e_i` for every component, with `h_i = step · max(1, |θ_i|)`.
pub(crate) struct Stencil {
    pub center: SolveResult,
    /// `(minus, plus, h)` per component.
    pub legs: Vec<(SolveResult, SolveResult, f64)>,
}

impl Stencil {
    pub fn new(instance: &ProblemInstance, theta: &[f64], step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::invalid("step", "must be positive"));
        }
        let center = distribution_for_theta(instance, theta)?;
        let mut legs = Vec::with_capacity(theta.len());
        for i in 0..theta.len() {
            let h = step * theta[i].abs().max(1.0);
            let mut t = theta.to_vec();
            t[i] = theta[i] - h;
            let minus = distribution_for_theta(instance, &t)?;
            t[i] = theta[i] + h;
            let plus = distribution_for_theta(instance, &t)?;
            legs.push((minus, plus, h));
        }
        Ok(Self { center, legs })
    }

    /// True when some stencil point has a different cutoff set than the center.
    pub fn crosses_cutoff(&self) -> bool {
        self.legs.iter().any(|(m, p, _)| {
            m.cutoff_set != self.center.cutoff_set || p.cutoff_set != self.center.cutoff_set
        })
    }

    pub fn require_smooth(&self) -> Result<()> {
        if self.crosses_cutoff() {
            Err(Error::NonSmooth {
                theta: self.center.theta.clone(),
            })
        } else {
            Ok(())
        }
    }

    /// `J[i][j] = ∂⟨p_θ, H_j⟩ / ∂θ_i` by central differences.
    pub fn energy_jacobian(&self, instance: &ProblemInstance) -> Vec<Vec<f64>> {
        self.legs
            .iter()
            .map(|(m, p, h)| {
                let em = instance.energies(&m.distribution);
                let ep = instance.energies(&p.distribution);
                ep.iter()
                    .zip(&em)
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect()
            })
            .collect()
    }
}

/// Target energies `U_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyTarget(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySolverOptions {
    pub max_iterations: usize,
    /// Stop once `max_j |U_j - ⟨p_θ, H_j⟩| ≤ tolerance`.
    pub tolerance: f64,
    /// Gradient norm below which Newton steps are attempted.
    pub newton_switch: f64,
    /// `‖θ‖` beyond which the target is declared unattainable.
    pub divergence_bound: f64,
    /// Finite-difference step for the metric tensor.
    pub fd_step: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    pub initial_theta: Option<Vec<f64>>,
}

impl Default for EnergySolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-12,
            newton_switch: 1e-3,
            divergence_bound: 1e6,
            fd_step: 1e-5,
            armijo_c: 1e-4,
            shrink: 0.5,
            initial_theta: None,
        }
    }
}

/// Finds `θ` with `⟨p_θ, H_j⟩ = U_j` by minimizing `Φ(θ) + θ·U`.
pub fn solve_for_energies(
    instance: &ProblemInstance,
    target: &EnergyTarget,
) -> Result<SolveResult> {
    solve_for_energies_with(instance, target, &EnergySolverOptions::default())
}

pub fn solve_for_energies_with(
    instance: &ProblemInstance,
    target: &EnergyTarget,
    options: &EnergySolverOptions,
) -> Result<SolveResult> {
    let n = instance.dimension();
    let u = &target.0;
    if u.len() != n {
        return Err(Error::invalid(
            "energies",
            format!("expected {n} components, got {}", u.len()),
        ));
    }
    let never_cut = (0..instance.alphabet_size())
        .all(|a| matches!(instance.model().f_at_zero_of(a), Ok(Boundary::NegInfinity)));
    for (j, (&uj, h)) in u.iter().zip(&instance.hamiltonians).enumerate() {
        let lo = h.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !uj.is_finite() || uj < lo || uj > hi {
            return Err(Error::Infeasible(format!(
                "energies[{j}] = {uj} outside [{lo}, {hi}]"
            )));
        }
        if never_cut && lo < hi && (uj == lo || uj == hi) {
            return Err(Error::Infeasible(format!(
                "energies[{j}] = {uj} needs zero probabilities, which this model never produces"
            )));
        }
    }

    let objective = |r: &SolveResult| r.massieu + dot(&r.theta, u);
    let gradient = |r: &SolveResult| -> Vec<f64> {
        instance
            .energies(&r.distribution)
            .iter()
            .zip(u)
            .map(|(e, t)| t - e)
            .collect()
    };
    let norm = |g: &[f64]| g.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let theta0 = options
        .initial_theta
        .clone()
        .unwrap_or_else(|| vec![0.0; n]);
    let mut current = distribution_for_theta(instance, &theta0)?;
    let mut grad = gradient(&current);

    for iteration in 0..options.max_iterations {
        let gnorm = norm(&grad);
        if gnorm <= options.tolerance {
            current.diagnostics.outer_iterations = iteration;
            return Ok(current);
        }
        let newton = if gnorm < options.newton_switch {
            newton_direction(instance, &current.theta, &grad, options.fd_step)
        } else {
            None
        };

        let mut accepted = None;
        let candidates: Vec<(Vec<f64>, bool)> = match newton {
            Some(d) => vec![(d, true), (grad.iter().map(|g| -g).collect(), false)],
            None => vec![(grad.iter().map(|g| -g).collect(), false)],
        };
        'directions: for (dir, is_newton) in candidates {
            let f0 = objective(&current);
            let slope = dot(&grad, &dir);
            let mut t = 1.0;
            for _ in 0..60 {
                let trial: Vec<f64> = current
                    .theta
                    .iter()
                    .zip(&dir)
                    .map(|(th, d)| th + t * d)
                    .collect();
                if let Ok(r) = distribution_for_theta(instance, &trial) {
                    let g_new = gradient(&r);
                    let armijo = objective(&r) <= f0 + options.armijo_c * t * slope;
                    if armijo || (is_newton && norm(&g_new) < 0.5 * gnorm) {
                        accepted = Some((r, g_new));
                        break 'directions;
                    }
                }
                t *= options.shrink;
            }
        }

        match accepted {
            Some((r, g)) => {
                let theta_norm = r.theta.iter().map(|x| x * x).sum::<f64>().sqrt();
                if theta_norm > options.divergence_bound {
                    return Err(Error::Infeasible(format!(
                        "parameters diverge (|theta| = {theta_norm:e})"
                    )));
                }
                current = r;
                grad = g;
            }
            None => {
                // No descent possible at working precision.
                if gnorm <= 1e-8 {
                    current.diagnostics.outer_iterations = iteration;
                    return Ok(current);
                }
                return Err(Error::NonConvergence {
                    iterations: iteration,
                    residual: gnorm,
                });
            }
        }
    }
    let gnorm = norm(&grad);
    if gnorm <= 1e-8 {
        current.diagnostics.outer_iterations = options.max_iterations;
        return Ok(current);
    }
    Err(Error::NonConvergence {
        iterations: options.max_iterations,
        residual: gnorm,
    })
}

/// Newton step `-g⁻¹ ∇F` with `g` the finite-difference metric tensor.
fn newton_direction(
    instance: &ProblemInstance,
    theta: &[f64],
    grad: &[f64],
    step: f64,
) -> Option<Vec<f64>> {
    let n = theta.len();
    let stencil = Stencil::new(instance, theta, step).ok()?;
    let jac = stencil.energy_jacobian(instance);
    let g = DMatrix::from_fn(n, n, |i, j| -0.5 * (jac[i][j] + jac[j][i]));
    let chol = g.cholesky()?;
    let d = chol.solve(&DVector::from_column_slice(grad));
    let d: Vec<f64> = d.iter().map(|x| -x).collect();
    d.iter().all(|x| x.is_finite()).then_some(d)
}

/// Result of [`verify_equilibrium`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Largest `obj(p) - obj(p*)` over the sampled `p`, floored at 0.
    pub max_violation: f64,
    /// Stationarity and cutoff certificates hold.
    pub certificate_ok: bool,
    /// Largest `|f_a(p_a) + α + Σ_j θ_j H_j(a)|` over the support.
    pub stationarity_residual: f64,
    /// Smallest `f_a(0) + Σ_j θ_j H_j(a) + α` over the cutoff set (`+∞` if empty).
    pub cutoff_slack: f64,
    pub samples: usize,
}

/// Checks the equilibrium certificates of `result` and compares its objective
/// against random distributions, all vertices, and mixtures of `p*` with the
/// vertices.
pub fn verify_equilibrium(
    instance: &ProblemInstance,
    result: &SolveResult,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    instance.check_theta(&result.theta)?;
    let size = instance.alphabet_size();
    let p = result.distribution.probs();
    if p.len() != size {
        return Err(Error::invalid(
            "probabilities",
            format!("expected {size} entries, got {}", p.len()),
        ));
    }
    let model = instance.model();
    let theta = &result.theta;

    let mut stationarity: f64 = 0.0;
    let mut slack = f64::INFINITY;
    let mut ok = true;
    for (a, &pa) in p.iter().enumerate() {
        let field = result.alpha + instance.energy_of(theta, a);
        if pa > 0.0 {
            stationarity = stationarity.max((model.eval_f(a, pa)? + field).abs());
        } else {
            match model.f_at_zero_of(a)? {
                Boundary::Finite(f0) => slack = slack.min(f0 + field),
                Boundary::NegInfinity => {
                    ok = false;
                    slack = f64::NEG_INFINITY;
                }
            }
        }
    }
    let listed_zero = result.cutoff_set.iter().all(|&a| a < size && p[a] == 0.0);
    ok &= listed_zero && stationarity < STATIONARITY_TOL && slack >= -STATIONARITY_TOL;

    let best = instance.objective(p, theta)?;
    let mut worst = f64::NEG_INFINITY;
    let mut samples = 0;
    let mut check = |q: &[f64]| -> Result<()> {
        worst = worst.max(instance.objective(q, theta)? - best);
        samples += 1;
        Ok(())
    };
    for a in 0..size {
        let mut v = vec![0.0; size];
        v[a] = 1.0;
        check(&v)?;
        for t in [1e-3, 1e-2, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
            let mix: Vec<f64> = (0..size)
                .map(|b| (1.0 - t) * p[b] + if b == a { t } else { 0.0 })
                .collect();
            check(&mix)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = vec![0.0; size];
    for _ in 0..trials {
        for x in draw.iter_mut() {
            *x = Exp1.sample(&mut rng);
        }
        let total: f64 = draw.iter().sum();
        draw.iter_mut().for_each(|x| *x /= total);
        check(&draw)?;
    }
    Ok(VerificationReport {
        max_violation: worst.max(0.0),
        certificate_ok: ok,
        stationarity_residual: stationarity,
        cutoff_slack: slack,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(model: EntropyModel) -> ProblemInstance {
        ProblemInstance::new(model, vec![vec![0.0, 1.0]], None).unwrap()
    }

    #[test]
    fn shannon_two_state() {
        let inst = two_state(EntropyModel::shannon());
        let r = distribution_for_theta(&inst, &[2f64.ln()]).unwrap();
        let p = r.distribution.probs();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!(r.cutoff_set.is_empty());
        assert!((r.massieu - 1.5f64.ln()).abs() < 1e-13);
        // Φ = 1 + α for Shannon
        assert!((r.alpha - (1.5f64.ln() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn tsallis_interior_and_cutoff() {
        let inst = two_state(EntropyModel::tsallis(2.0).unwrap());
        let r = distribution_for_theta(&inst, &[1.0]).unwrap();
        assert!((r.distribution.probs()[0] - 0.75).abs() < 1e-14);
        assert!((r.alpha + 0.5).abs() < 1e-14);
        assert!(r.cutoff_set.is_empty());

        let r = distribution_for_theta(&inst, &[3.0]).unwrap();
        assert_eq!(r.distribution.probs(), &[1.0, 0.0]);
        assert!((r.alpha + 1.0).abs() < 1e-14);
        assert_eq!(r.cutoff_set, vec![1]);
        assert!(r.massieu.abs() < 1e-14);
    }

    #[test]
    fn zero_theta_is_uniform() {
        for model in [
            EntropyModel::shannon(),
            EntropyModel::tsallis(0.4).unwrap(),
            EntropyModel::tsallis(3.0).unwrap(),
            EntropyModel::tsallis_escort(1.5).unwrap(),
        ] {
            let inst =
                ProblemInstance::new(model, vec![vec![0.3, -1.0, 2.0, 5.0, 0.0]], None).unwrap();
            let r = distribution_for_theta(&inst, &[0.0]).unwrap();
            for &p in r.distribution.probs() {
                assert!((p - 0.2).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn alpha_refers_to_unshifted_hamiltonian() {
        let a = two_state(EntropyModel::tsallis(2.0).unwrap());
        let b = ProblemInstance::new(
            EntropyModel::tsallis(2.0).unwrap(),
            vec![vec![10.0, 11.0]],
            None,
        )
        .unwrap();
        let ra = distribution_for_theta(&a, &[1.0]).unwrap();
        let rb = distribution_for_theta(&b, &[1.0]).unwrap();
        assert!(ra.distribution.sup_distance(&rb.distribution) < 1e-14);
        assert!((rb.alpha - (ra.alpha - 10.0)).abs() < 1e-12);
    }

    #[test]
    fn single_symbol_alphabet() {
        let inst = ProblemInstance::new(EntropyModel::tsallis(2.0).unwrap(), vec![vec![4.0]], None)
            .unwrap();
        let r = distribution_for_theta(&inst, &[2.0]).unwrap();
        assert_eq!(r.distribution.probs(), &[1.0]);
        let rep = verify_equilibrium(&inst, &r, 10, 0).unwrap();
        assert!(rep.certificate_ok);
    }

    #[test]
    fn bisection_trace_is_monotone() {
        let inst = ProblemInstance::new(
            EntropyModel::tsallis(1.5).unwrap(),
            vec![vec![0.0, 0.4, 1.0, 3.0]],
            None,
        )
        .unwrap();
        let opts = SolverOptions {
            record_trace: true,
            ..Default::default()
        };
        let r = distribution_for_theta_with(&inst, &[1.7], &opts).unwrap();
        let mut trace = r.diagnostics.trace.clone();
        assert!(trace.len() > 10);
        trace.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in trace.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let e = ProblemInstance::new(
            EntropyModel::shannon(),
            vec![vec![0.0, 1.0], vec![1.0]],
            None,
        );
        assert!(matches!(e, Err(Error::Invalid { .. })));
        let e = ProblemInstance::new(
            EntropyModel::weighted_shannon(vec![1.0, 2.0, 3.0]).unwrap(),
            vec![vec![0.0, 1.0]],
            None,
        );
        assert!(e.is_err());
        let inst = two_state(EntropyModel::shannon());
        assert!(distribution_for_theta(&inst, &[1.0, 2.0]).is_err());
        assert!(ProblemInstance::new(
            EntropyModel::shannon(),
            vec![vec![0.0, 1.0]],
            Some(vec!["x y".into(), "z".into()])
        )
        .is_err());
    }

    #[test]
    fn inverse_problem_examples() {
        let inst = two_state(EntropyModel::shannon());
        let r = solve_for_energies(&inst, &EnergyTarget(vec![1.0 / 3.0])).unwrap();
        assert!((r.theta[0] - 2f64.ln()).abs() < 1e-9);
        let r = solve_for_energies(&inst, &EnergyTarget(vec![0.5])).unwrap();
        assert!(r.theta[0].abs() < 1e-12);

        let inst = two_state(EntropyModel::tsallis(2.0).unwrap());
        let r = solve_for_energies(&inst, &EnergyTarget(vec![0.25])).unwrap();
        assert!((r.theta[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inverse_problem_infeasible() {
        let inst = two_state(EntropyModel::shannon());
        assert!(matches!(
            solve_for_energies(&inst, &EnergyTarget(vec![1.5])),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_for_energies(&inst, &EnergyTarget(vec![0.0])),
            Err(Error::Infeasible(_))
        ));
        // finite f(0): boundary energy is attained with a cutoff
        let inst = two_state(EntropyModel::tsallis(2.0).unwrap());
        let r = solve_for_energies(&inst, &EnergyTarget(vec![0.0])).unwrap();
        assert_eq!(r.distribution.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn verification_detects_perturbation() {
        let inst = two_state(EntropyModel::tsallis(2.0).unwrap());
        let r = distribution_for_theta(&inst, &[3.0]).unwrap();
        let rep = verify_equilibrium(&inst, &r, 10_000, 7).unwrap();
        assert!(rep.certificate_ok);
        assert!(rep.max_violation <= 1e-10);
        assert!((rep.cutoff_slack - 1.0).abs() < 1e-12);

        let inst = two_state(EntropyModel::shannon());
        let r = distribution_for_theta(&inst, &[2f64.ln()]).unwrap();
        let rep = verify_equilibrium(&inst, &r, 10_000, 7).unwrap();
        assert!(rep.certificate_ok && rep.max_violation <= 1e-10);

        let mut bad = r.clone();
        let mut p = bad.distribution.probs().to_vec();
        p[0] += 0.01;
        bad.distribution = Distribution::from_weights(&p).unwrap();
        let rep = verify_equilibrium(&inst, &bad, 100, 7).unwrap();
        assert!(!rep.certificate_ok);
        assert!(rep.stationarity_residual > 1e-3);
    }
}
