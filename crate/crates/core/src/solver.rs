//! Dual path-following predictor-corrector method for barriers with negative
//! curvature.
//!
//! One outer iteration: compute the maximal feasible step ᾱ_k along v(y_k),
//! escalate the trial step α through the η-recurrence while the growth
//! measure Γ stays below β′ = 1/6, divide the penalty by ξ_ᾱ(α_k), then
//! re-center with damped Newton into the tightening neighborhood
//! γ(y, μ) ≤ μ/25. The slack is carried incrementally (s ← s − αA*v and
//! s ← s + tA*d) so its small components keep full relative precision; this
//! is what lets the superlinear tail run down to μ ≈ 1e-13 in f64.

use crate::geometry::{
    eta, xi, ConicProblem, GeometryError, LocalModel, PathIterate, PredictorContext,
};
use crate::linalg::Vec64;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Target absolute accuracy on the dual objective; stop once μ ≤ ε/ν.
    pub epsilon: f64,
    /// Neighborhood coefficient: β_k = coefficient · μ_k.
    pub beta_coefficient: f64,
    /// Predictor acceptance tolerance for Γ.
    pub beta_prime: f64,
    /// The corrector aims at this fraction of β so the stored iterate keeps
    /// its invariant under re-evaluation rounding.
    pub corrector_tolerance_slack: f64,
    pub max_outer_iterations: usize,
    pub max_corrector_steps: usize,
    pub max_predictor_trials: usize,
    /// Numerical floor for corrector targets; γ cannot be certified below
    /// roughly √m·ε_mach with incremental slack updates.
    pub gamma_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-8,
            beta_coefficient: 1.0 / 25.0,
            beta_prime: 1.0 / 6.0,
            corrector_tolerance_slack: 0.9,
            max_outer_iterations: 600,
            max_corrector_steps: 120,
            max_predictor_trials: 64,
            gamma_floor: 1e-15,
        }
    }
}

impl SolverConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        SolverConfig {
            epsilon,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.epsilon <= 0.0 || self.epsilon.is_nan() {
            return Err("epsilon must be positive".into());
        }
        if !(self.beta_coefficient > 0.0 && self.beta_coefficient <= 1.0 / 25.0) {
            return Err("beta coefficient must be in (0, 1/25]".into());
        }
        if !(self.beta_prime > 0.0 && self.beta_prime <= 1.0 / 6.0) {
            return Err("beta' must be in (0, 1/6]".into());
        }
        if !(self.corrector_tolerance_slack > 0.0 && self.corrector_tolerance_slack <= 1.0) {
            return Err("corrector tolerance slack must be in (0, 1]".into());
        }
        Ok(())
    }
}

/// κ₁ = ν + β(β + √ν)/(1 − β): the certified gap factor, gap ≤ κ₁μ inside
/// the β-neighborhood.
pub fn kappa1(nu: f64, beta: f64) -> f64 {
    nu + beta * (beta + nu.sqrt()) / (1.0 - beta)
}

/// One evaluated predictor trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub alpha: f64,
    /// Γ value when the evaluation succeeded; a failed slack-interior check
    /// counts as a rejection with no value.
    pub gamma_big: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct IterateRecord {
    pub k: usize,
    /// Penalty after this iteration's update, μ_{k+1}.
    pub mu: f64,
    pub alpha_bar: f64,
    /// Accepted (possibly fallback-reduced) predictor step.
    pub alpha: f64,
    /// Index of the accepted step in the trial sequence (i_k).
    pub trial_index: usize,
    /// γ(p_k, μ_{k+1}) at the corrector start.
    pub gamma_pre: f64,
    /// γ(y_{k+1}, μ_{k+1}) after the corrector.
    pub gamma_post: f64,
    pub corrector_steps: usize,
    pub dual_objective: f64,
    /// κ₁μ_{k+1}: a certified bound on f* − ⟨b, y_{k+1}⟩.
    pub gap_bound: f64,
    // analysis payload (not part of the CSV surface)
    pub y: Vec64,
    pub slack: Vec64,
    pub alpha0: f64,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone)]
pub struct InitialIterate {
    pub y: Vec64,
    pub slack: Vec64,
    pub gamma: f64,
    pub newton_steps: usize,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub initial: InitialIterate,
    pub records: Vec<IterateRecord>,
    pub nu: f64,
    pub config: SolverConfig,
}

impl ConvergenceTrace {
    /// μ₀ = 1 followed by the per-iteration penalties.
    pub fn mu_sequence(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.records.iter().map(|r| r.mu))
            .collect()
    }

    pub fn final_iterate(&self) -> PathIterate {
        match self.records.last() {
            Some(r) => PathIterate {
                y: r.y.clone(),
                s: r.slack.clone(),
                mu: r.mu,
                gamma: r.gamma_post,
            },
            None => PathIterate {
                y: self.initial.y.clone(),
                s: self.initial.slack.clone(),
                mu: 1.0,
                gamma: self.initial.gamma,
            },
        }
    }

    pub fn final_mu(&self) -> f64 {
        self.records.last().map_or(1.0, |r| r.mu)
    }

    pub fn dual_objective(&self) -> f64 {
        self.records
            .last()
            .map_or(f64::NEG_INFINITY, |r| r.dual_objective)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveErrorKind {
    #[error("corrector stalled: γ = {gamma:.3e} did not reach target {target:.3e}")]
    CorrectorStalled { gamma: f64, target: f64 },
    #[error("initial predictor step rejected: Γ(α₀) = {gamma_big:.3e} > β' (oracle bug)")]
    InitialStepRejected { gamma_big: f64 },
    #[error("iteration limit reached")]
    IterationLimit,
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Solver failure carrying whatever trace was accumulated.
#[derive(Debug, thiserror::Error)]
#[error("{kind}")]
pub struct SolveError {
    pub kind: SolveErrorKind,
    pub trace: Option<ConvergenceTrace>,
}

impl SolveError {
    fn bare(kind: SolveErrorKind) -> Self {
        SolveError { kind, trace: None }
    }
}

#[derive(Debug)]
pub struct CorrectorResult {
    pub y: Vec64,
    pub s: Vec64,
    pub gamma: f64,
    pub gamma_initial: f64,
    pub steps: usize,
}

/// Damped Newton on φ_μ(y) = f(y) − ⟨b, y⟩/μ until the decrement (= γ) drops
/// to `target`. Step length 1/(1+γ) while γ > 1/4, full steps after.
pub fn corrector(
    problem: &ConicProblem,
    y_pred: Vec64,
    s_pred: Vec64,
    mu: f64,
    target: f64,
    config: &SolverConfig,
) -> Result<CorrectorResult, SolveErrorKind> {
    let mut y = y_pred;
    let mut s = s_pred;
    let mut first_gamma = None;
    let mut last_gamma = f64::NAN;
    for step in 0..=config.max_corrector_steps {
        let model = LocalModel::at_slack(problem, &s).map_err(SolveErrorKind::Geometry)?;
        let (d, gamma) = model
            .newton_displacement(problem.b(), mu)
            .map_err(SolveErrorKind::Geometry)?;
        first_gamma.get_or_insert(gamma);
        last_gamma = gamma;
        if gamma <= target {
            return Ok(CorrectorResult {
                y,
                s,
                gamma,
                gamma_initial: first_gamma.unwrap(),
                steps: step,
            });
        }
        if step == config.max_corrector_steps {
            break;
        }
        let t = if gamma > 0.25 { 1.0 / (1.0 + gamma) } else { 1.0 };
        y -= &d * t;
        s += problem.a().apply_adjoint(&d) * t;
        if !problem.slack_is_interior(&s) {
            return Err(SolveErrorKind::Geometry(GeometryError::OutsideCone));
        }
    }
    Err(SolveErrorKind::CorrectorStalled {
        gamma: last_gamma,
        target,
    })
}

fn proximity_of(problem: &ConicProblem, s: &Vec64, mu: f64) -> Result<f64, SolveErrorKind> {
    let model = LocalModel::at_slack(problem, s).map_err(SolveErrorKind::Geometry)?;
    model.proximity(problem.b(), mu).map_err(SolveErrorKind::Geometry)
}

/// Centers an arbitrary strictly feasible point at the given μ to the stated
/// proximity; used by diagnostics that need near-exact central path points.
pub fn center_to(
    problem: &ConicProblem,
    y: Vec64,
    mu: f64,
    gamma_tol: f64,
    config: &SolverConfig,
) -> Result<PathIterate, SolveErrorKind> {
    let s = problem.slack(&y);
    if !problem.slack_is_interior(&s) {
        return Err(SolveErrorKind::Geometry(GeometryError::OutsideCone));
    }
    let res = corrector(problem, y, s, mu, gamma_tol, config)?;
    Ok(PathIterate {
        y: res.y,
        s: res.s,
        mu,
        gamma: res.gamma,
    })
}

/// Step 1 of the method: center the start point at μ₀ = 1. A start already
/// inside N(1, β₀) is returned unchanged.
pub fn initialize(
    problem: &ConicProblem,
    config: &SolverConfig,
) -> Result<InitialIterate, SolveErrorKind> {
    let y = problem.y_start().clone();
    let s = problem.slack(&y);
    let beta0 = config.beta_coefficient;
    let gamma = proximity_of(problem, &s, 1.0)?;
    if gamma <= beta0 {
        return Ok(InitialIterate {
            y,
            slack: s,
            gamma,
            newton_steps: 0,
        });
    }
    let target = (config.corrector_tolerance_slack * beta0).max(config.gamma_floor);
    let res = corrector(problem, y, s, 1.0, target, config)?;
    Ok(InitialIterate {
        y: res.y,
        slack: res.s,
        gamma: res.gamma,
        newton_steps: res.steps,
    })
}

#[derive(Debug)]
pub struct PredictorOutcome {
    pub alpha0: f64,
    pub trials: Vec<TrialRecord>,
    /// Index of the last passing trial (the maximal i with Γ ≤ β').
    pub accepted: usize,
}

/// Step b of the method: escalate α through the η-recurrence starting from
/// α₀ = (1/6)min{1, 1/‖v‖_y} and keep the last step with Γ ≤ β'. The search
/// stops at the first failing trial; the Γ sequence is not provably monotone,
/// so nothing past a failure is examined. `mu_next_floor` keeps the terminal
/// iteration from driving μ below what the corrector can certify in f64.
pub fn predictor_search(
    problem: &ConicProblem,
    ctx: &PredictorContext,
    mu: f64,
    mu_next_floor: f64,
    config: &SolverConfig,
) -> Result<PredictorOutcome, SolveErrorKind> {
    let alpha0 = (1.0 / 6.0) * (1.0f64).min(1.0 / ctx.v_local_norm);
    let gamma0 = ctx
        .big_gamma(problem, mu, alpha0)
        .map_err(SolveErrorKind::Geometry)?;
    if gamma0 > config.beta_prime {
        return Err(SolveErrorKind::InitialStepRejected { gamma_big: gamma0 });
    }
    let mut trials = vec![TrialRecord {
        alpha: alpha0,
        gamma_big: Some(gamma0),
        passed: true,
    }];
    let mut accepted = 0;
    let mut alpha = alpha0;
    while trials.len() < config.max_predictor_trials {
        let next = eta(ctx.alpha_bar, alpha);
        if next >= ctx.alpha_bar * (1.0 - 1e-12) {
            break;
        }
        if let Ok(xi_next) = xi(ctx.alpha_bar, next) {
            if mu / xi_next < mu_next_floor {
                break;
            }
        } else {
            break;
        }
        match ctx.big_gamma(problem, mu, next) {
            Ok(g) if g <= config.beta_prime => {
                trials.push(TrialRecord {
                    alpha: next,
                    gamma_big: Some(g),
                    passed: true,
                });
                accepted = trials.len() - 1;
                alpha = next;
            }
            Ok(g) => {
                trials.push(TrialRecord {
                    alpha: next,
                    gamma_big: Some(g),
                    passed: false,
                });
                break;
            }
            Err(GeometryError::OutsideCone) | Err(GeometryError::RankDeficient) => {
                // numerically at the boundary: treat like a rejection
                trials.push(TrialRecord {
                    alpha: next,
                    gamma_big: None,
                    passed: false,
                });
                break;
            }
            Err(e) => return Err(SolveErrorKind::Geometry(e)),
        }
    }
    Ok(PredictorOutcome {
        alpha0,
        trials,
        accepted,
    })
}

/// The complete method: initialization into N(1, β₀), then predictor /
/// penalty update / corrector until μ ≤ ε/ν.
#[allow(clippy::result_large_err)] // failures carry the partial trace by design
pub fn solve(problem: &ConicProblem, config: &SolverConfig) -> Result<ConvergenceTrace, SolveError> {
    config
        .validate()
        .map_err(|m| SolveError::bare(SolveErrorKind::Config(m)))?;
    let nu = problem.nu();
    let mu_stop = config.epsilon / nu;
    let mu_next_floor = (0.45 * mu_stop).max(3e-14);

    let initial = initialize(problem, config).map_err(SolveError::bare)?;
    let mut trace = ConvergenceTrace {
        initial: initial.clone(),
        records: Vec::new(),
        nu,
        config: config.clone(),
    };
    let mut y = initial.y;
    let mut s = initial.slack;
    let mut mu = 1.0;

    let fail = |kind, trace: ConvergenceTrace| SolveError {
        kind,
        trace: Some(trace),
    };

    let mut k = 0;
    while mu > mu_stop {
        if k >= config.max_outer_iterations {
            return Err(fail(SolveErrorKind::IterationLimit, trace));
        }
        let ctx = match PredictorContext::new(problem, y.clone(), s.clone()) {
            Ok(c) => c,
            Err(e) => return Err(fail(SolveErrorKind::Geometry(e), trace)),
        };
        let outcome = match predictor_search(problem, &ctx, mu, mu_next_floor, config) {
            Ok(o) => o,
            Err(e) => return Err(fail(e, trace)),
        };

        // Corrector with retreat: largest passing trial first, α₀ last.
        let passing: Vec<usize> = outcome
            .trials
            .iter()
            .enumerate()
            .filter(|(_, t)| t.passed)
            .map(|(i, _)| i)
            .collect();
        let mut corrected = None;
        let mut last_err = None;
        for &idx in passing.iter().rev() {
            let alpha = outcome.trials[idx].alpha;
            let xi_val = match xi(ctx.alpha_bar, alpha) {
                Ok(v) => v,
                Err(e) => return Err(fail(SolveErrorKind::Geometry(e), trace)),
            };
            let mu_next = mu / xi_val;
            let beta_next = config.beta_coefficient * mu_next;
            let target =
                (config.corrector_tolerance_slack * beta_next).max(config.gamma_floor);
            match corrector(
                problem,
                ctx.y_at(alpha),
                ctx.slack_at(alpha),
                mu_next,
                target,
                config,
            ) {
                Ok(res) => {
                    corrected = Some((idx, alpha, mu_next, beta_next, res));
                    break;
                }
                Err(e @ SolveErrorKind::CorrectorStalled { .. }) => {
                    last_err = Some(e);
                }
                Err(e) => return Err(fail(e, trace)),
            }
        }
        let Some((idx, alpha, mu_next, beta_next, res)) = corrected else {
            let kind = last_err.unwrap_or(SolveErrorKind::CorrectorStalled {
                gamma: f64::NAN,
                target: f64::NAN,
            });
            return Err(fail(kind, trace));
        };

        y = res.y;
        s = res.s;
        mu = mu_next;
        trace.records.push(IterateRecord {
            k,
            mu,
            alpha_bar: ctx.alpha_bar,
            alpha,
            trial_index: idx,
            gamma_pre: res.gamma_initial,
            gamma_post: res.gamma,
            corrector_steps: res.steps,
            dual_objective: problem.dual_objective(&y),
            gap_bound: kappa1(nu, beta_next) * mu,
            y: y.clone(),
            slack: s.clone(),
            alpha0: outcome.alpha0,
            trials: outcome.trials,
        });
        k += 1;
    }
    Ok(trace)
}


#[cfg(test)]
mod robustness_tests {
    use super::*;
    use crate::cones::ConeDescriptor;
    use crate::linalg::{LinearMap, Mat64};

    #[test]
    fn unbounded_optimal_set_fails_loudly() {
        // max y₁ over {y₁ ≤ 1, y₂ ≤ 1}: the optimal face is an unbounded
        // ray and no strictly feasible primal exists, so no central path;
        // the run must end in a typed error rather than loop forever
        let p = ConicProblem::new(
            LinearMap::new(Mat64::identity(2, 2)),
            Vec64::from_row_slice(&[1.0, 0.0]),
            Vec64::from_row_slice(&[1.0, 1.0]),
            ConeDescriptor::Orthant(2),
            Vec64::from_row_slice(&[0.0, 0.0]),
        )
        .unwrap();
        let config = SolverConfig {
            epsilon: 1e-8,
            max_outer_iterations: 50,
            max_corrector_steps: 40,
            ..Default::default()
        };
        let err = solve(&p, &config).unwrap_err();
        assert!(matches!(
            err.kind,
            SolveErrorKind::CorrectorStalled { .. }
                | SolveErrorKind::IterationLimit
                | SolveErrorKind::Geometry(GeometryError::UnboundedStep)
        ));
    }
}
