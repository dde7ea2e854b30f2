//! The reduced dual problem and its geometry.
//!
//! For data (A, b, c, K) the dual feasible set is Q = {y : c − A*y ∈ K*} with
//! barrier f(y) = F_*(c − A*y). Everything the predictor-corrector needs is a
//! local quantity of f: the gradient proximity measure γ(y, μ), the prediction
//! direction v(y) = [∇²f(y)]⁻¹∇f(y), the maximal feasible step ᾱ(y) along it,
//! and the growth measure Γ_μ(y, α) that prices a predictor step before the
//! corrector runs.

use crate::cones::{BarrierOracle, ConeDescriptor, ConeError, StepLimit};
use crate::linalg::{LinalgError, LinearMap, SymOperator, Vec64};
#[cfg(test)]
use crate::linalg::Mat64;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("point is outside the cone interior")]
    OutsideCone,
    #[error("Hessian of the reduced dual barrier is rank deficient")]
    RankDeficient,
    #[error("the predictor direction is a recession direction (unbounded step)")]
    UnboundedStep,
    #[error("step {alpha} is not below the maximal feasible step {alpha_bar}")]
    StepAtBoundary { alpha: f64, alpha_bar: f64 },
    #[error("constraint matrix does not have full row rank")]
    SurjectivityViolated,
    #[error("start point is not strictly dual feasible")]
    InfeasibleStart,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Cone(ConeError),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<ConeError> for GeometryError {
    fn from(e: ConeError) -> Self {
        match e {
            ConeError::OutsideCone => GeometryError::OutsideCone,
            other => GeometryError::Cone(other),
        }
    }
}

impl From<LinalgError> for GeometryError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotPositiveDefinite | LinalgError::RankDeficient => {
                GeometryError::RankDeficient
            }
            other => GeometryError::Linalg(other),
        }
    }
}

/// Problem data for max{⟨b, y⟩ : c − A*y ∈ K*} plus a strictly feasible dual
/// start point. The cone descriptor describes K; the slack barrier is F_*.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    a: LinearMap,
    b: Vec64,
    c: Vec64,
    cone: ConeDescriptor,
    y_start: Vec64,
    oracle: BarrierOracle,
}

impl ConicProblem {
    pub fn new(
        a: LinearMap,
        b: Vec64,
        c: Vec64,
        cone: ConeDescriptor,
        y_start: Vec64,
    ) -> Result<Self, GeometryError> {
        let (m, n) = (a.dim_out(), a.dim_in());
        for (len, expected) in [(b.len(), m), (c.len(), n), (y_start.len(), m)] {
            if len != expected {
                return Err(GeometryError::DimensionMismatch { expected, got: len });
            }
        }
        if cone.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: cone.dim(),
            });
        }
        if !a.has_full_row_rank() {
            return Err(GeometryError::SurjectivityViolated);
        }
        let oracle = BarrierOracle::dual_for(cone.clone())?;
        let problem = ConicProblem {
            a,
            b,
            c,
            cone,
            y_start,
            oracle,
        };
        if !problem.slack_is_interior(&problem.slack(&problem.y_start)) {
            return Err(GeometryError::InfeasibleStart);
        }
        Ok(problem)
    }

    pub fn a(&self) -> &LinearMap {
        &self.a
    }

    pub fn b(&self) -> &Vec64 {
        &self.b
    }

    pub fn c(&self) -> &Vec64 {
        &self.c
    }

    pub fn cone(&self) -> &ConeDescriptor {
        &self.cone
    }

    pub fn y_start(&self) -> &Vec64 {
        &self.y_start
    }

    /// Barrier oracle for the slack cone K*.
    pub fn oracle(&self) -> &BarrierOracle {
        &self.oracle
    }

    pub fn dim_y(&self) -> usize {
        self.a.dim_out()
    }

    pub fn dim_slack(&self) -> usize {
        self.a.dim_in()
    }

    pub fn nu(&self) -> f64 {
        self.cone.barrier_parameter()
    }

    /// s(y) = c − A*y.
    pub fn slack(&self, y: &Vec64) -> Vec64 {
        &self.c - self.a.apply_adjoint(y)
    }

    pub fn slack_is_interior(&self, s: &Vec64) -> bool {
        self.cone.is_interior(s)
    }

    pub fn dual_objective(&self, y: &Vec64) -> f64 {
        self.b.dot(y)
    }
}

/// A known optimal pair for generated instances.
#[derive(Debug, Clone)]
pub struct KnownOptimum {
    pub y_star: Vec64,
    pub s_star: Vec64,
    pub x_star: Option<Vec64>,
    pub f_star: f64,
}

/// One dual iterate: the point, its slack kept in sync incrementally, the
/// penalty, and the proximity γ(y, μ).
#[derive(Debug, Clone)]
pub struct PathIterate {
    pub y: Vec64,
    pub s: Vec64,
    pub mu: f64,
    pub gamma: f64,
}

/// Gradient and Hessian data of f at one point, plus the slack-side pieces
/// they were assembled from.
#[derive(Debug)]
pub struct LocalModel {
    /// ∇F_*(s)
    pub grad_slack: Vec64,
    /// ∇²F_*(s)
    pub hess_slack: SymOperator,
    /// ∇f(y) = −A ∇F_*(s)
    pub grad: Vec64,
    /// ∇²f(y) = A ∇²F_*(s) A*
    pub hess: SymOperator,
}

impl LocalModel {
    pub fn at_slack(problem: &ConicProblem, s: &Vec64) -> Result<Self, GeometryError> {
        let grad_slack = problem.oracle.gradient(s)?;
        let hess_slack = problem.oracle.hessian(s)?;
        let grad = -problem.a.apply(&grad_slack);
        let a_mat = problem.a.matrix();
        let hess =
            SymOperator::from_symmetric(a_mat * hess_slack.matrix() * a_mat.transpose());
        Ok(LocalModel {
            grad_slack,
            hess_slack,
            grad,
            hess,
        })
    }

    /// ‖w‖_y = ⟨w, [∇²f(y)]⁻¹ w⟩^{1/2} for functionals on H.
    pub fn dual_local_norm(&self, w: &Vec64) -> Result<f64, GeometryError> {
        Ok(self.hess.inv_quad_form(w)?.max(0.0).sqrt())
    }

    /// γ(y, μ) = ‖∇f(y) − b/μ‖_y; also the Newton decrement of the centering
    /// problem min f(y) − ⟨b, y⟩/μ.
    pub fn proximity(&self, b: &Vec64, mu: f64) -> Result<f64, GeometryError> {
        self.dual_local_norm(&(&self.grad - b / mu))
    }

    /// Newton displacement d = [∇²f]⁻¹(∇f − b/μ) and its local norm (= γ).
    pub fn newton_displacement(&self, b: &Vec64, mu: f64) -> Result<(Vec64, f64), GeometryError> {
        let g = &self.grad - b / mu;
        let d = self.hess.solve(&g)?;
        Ok((d.clone(), g.dot(&d).max(0.0).sqrt()))
    }
}

/// Slack with its strict-interior flag (reported, not thrown).
pub fn slack(problem: &ConicProblem, y: &Vec64) -> (Vec64, bool) {
    let s = problem.slack(y);
    let interior = problem.slack_is_interior(&s);
    (s, interior)
}

/// (f(y), ∇f(y), ∇²f(y)).
pub fn f_derivatives(
    problem: &ConicProblem,
    y: &Vec64,
) -> Result<(f64, Vec64, SymOperator), GeometryError> {
    let s = problem.slack(y);
    let value = problem.oracle.value(&s)?;
    let model = LocalModel::at_slack(problem, &s)?;
    Ok((value, model.grad, model.hess))
}

pub fn proximity_gamma(problem: &ConicProblem, y: &Vec64, mu: f64) -> Result<f64, GeometryError> {
    let model = LocalModel::at_slack(problem, &problem.slack(y))?;
    model.proximity(&problem.b, mu)
}

/// θ(y) = min_t ‖∇f(y) − t b‖_y; zero exactly on the central path. The
/// minimizing t is ⟨∇f, [∇²f]⁻¹b⟩/‖b‖²_y; evaluating the residual vector at
/// that t (rather than subtracting the two quadratic forms) keeps θ accurate
/// near the path where the forms cancel.
pub fn theta(problem: &ConicProblem, y: &Vec64) -> Result<f64, GeometryError> {
    let model = LocalModel::at_slack(problem, &problem.slack(y))?;
    let hinv_b = model.hess.solve(&problem.b)?;
    let gb = model.grad.dot(&hinv_b);
    let bb = problem.b.dot(&hinv_b);
    let t_star = gb / bb;
    model.dual_local_norm(&(&model.grad - &problem.b * t_star))
}

/// v(y) = [∇²f(y)]⁻¹ ∇f(y).
pub fn predictor_direction(problem: &ConicProblem, y: &Vec64) -> Result<Vec64, GeometryError> {
    let model = LocalModel::at_slack(problem, &problem.slack(y))?;
    Ok(model.hess.solve(&model.grad)?)
}

/// p(y) = y + v(y).
pub fn prediction_point(problem: &ConicProblem, y: &Vec64) -> Result<Vec64, GeometryError> {
    Ok(y + predictor_direction(problem, y)?)
}

/// ‖p(y) − y_* − [∇²f(y)]⁻¹ A ∇²F_*(s(y)) s_*‖_G, the residual of the
/// prediction representation through the optimal pair. Analytically zero.
pub fn prediction_identity_residual(
    problem: &ConicProblem,
    y: &Vec64,
    optimum: &KnownOptimum,
    g_metric: &SymOperator,
) -> Result<f64, GeometryError> {
    let s = problem.slack(y);
    let model = LocalModel::at_slack(problem, &s)?;
    let v = model.hess.solve(&model.grad)?;
    let w = problem.a.apply(&(model.hess_slack.matrix() * &optimum.s_star));
    let rhs = &optimum.y_star + model.hess.solve(&w)?;
    let residual = y + v - rhs;
    Ok(g_metric.quad_form(&residual).max(0.0).sqrt())
}

/// s_p(y) = s(y) − A*v(y).
pub fn predicted_slack(problem: &ConicProblem, y: &Vec64) -> Result<Vec64, GeometryError> {
    let s = problem.slack(y);
    let model = LocalModel::at_slack(problem, &s)?;
    let v = model.hess.solve(&model.grad)?;
    Ok(&s - problem.a.apply_adjoint(&v))
}

/// A ∇²F_*(s) s_p, which vanishes identically; its computed norm is a
/// round-off health check for the Newton system at an iterate with slack s.
pub fn null_identity_residual_at(
    problem: &ConicProblem,
    s: &Vec64,
) -> Result<f64, GeometryError> {
    let model = LocalModel::at_slack(problem, s)?;
    let v = model.hess.solve(&model.grad)?;
    let s_p = s - problem.a.apply_adjoint(&v);
    Ok(problem.a.apply(&(model.hess_slack.matrix() * s_p)).norm())
}

/// [`null_identity_residual_at`] with the slack taken from c − A*y. Deep in
/// the tail prefer the solver's incrementally maintained slack: re-deriving
/// it here loses the active components' relative precision.
pub fn null_identity_residual(problem: &ConicProblem, y: &Vec64) -> Result<f64, GeometryError> {
    null_identity_residual_at(problem, &problem.slack(y))
}

/// Predictor data frozen at one iterate: direction, maximal step, σ, and the
/// factorized Hessian reused by every trial evaluation of Γ.
#[derive(Debug)]
pub struct PredictorContext {
    pub y: Vec64,
    pub s: Vec64,
    pub model: LocalModel,
    /// v(y)
    pub v: Vec64,
    /// ‖v(y)‖_y
    pub v_local_norm: f64,
    /// A*v(y): the slack moves as s − α·(A*v)
    pub slack_dir: Vec64,
    /// ᾱ(y)
    pub alpha_bar: f64,
    /// σ_{s(y)}(−A*v(y))
    pub sigma: f64,
}

impl PredictorContext {
    pub fn new(problem: &ConicProblem, y: Vec64, s: Vec64) -> Result<Self, GeometryError> {
        let model = LocalModel::at_slack(problem, &s)?;
        let v = model.hess.solve(&model.grad)?;
        let v_local_norm = model.grad.dot(&v).max(0.0).sqrt();
        let slack_dir = problem.a.apply_adjoint(&v);
        let step_dir = -&slack_dir;
        let alpha_bar = match problem.oracle.max_step(&s, &step_dir)? {
            StepLimit::Finite(a) => a,
            StepLimit::Unbounded => return Err(GeometryError::UnboundedStep),
        };
        let sigma = problem.oracle.sigma_measure(&s, &step_dir)?;
        Ok(PredictorContext {
            y,
            s,
            model,
            v,
            v_local_norm,
            slack_dir,
            alpha_bar,
            sigma,
        })
    }

    pub fn y_at(&self, alpha: f64) -> Vec64 {
        &self.y + &self.v * alpha
    }

    pub fn slack_at(&self, alpha: f64) -> Vec64 {
        &self.s - &self.slack_dir * alpha
    }

    /// Γ_μ(y, α) = (1 + α σ)·‖∇f(y(α)) − (ξ_ᾱ(α)/μ)b‖_y: fresh gradient at
    /// y(α), local norm at the base point y.
    pub fn big_gamma(
        &self,
        problem: &ConicProblem,
        mu: f64,
        alpha: f64,
    ) -> Result<f64, GeometryError> {
        let xi_val = xi(self.alpha_bar, alpha)?;
        let s_alpha = self.slack_at(alpha);
        if !problem.slack_is_interior(&s_alpha) {
            return Err(GeometryError::OutsideCone);
        }
        let grad_alpha = -problem.a.apply(&problem.oracle.gradient(&s_alpha)?);
        let w = grad_alpha - &problem.b * (xi_val / mu);
        let norm = self.model.dual_local_norm(&w)?;
        Ok((1.0 + alpha * self.sigma) * norm)
    }
}

/// ᾱ(y): the exact boundary parameter of the slack cone along −A*v(y).
pub fn max_feasible_step(problem: &ConicProblem, y: &Vec64) -> Result<f64, GeometryError> {
    let s = problem.slack(y);
    let ctx = PredictorContext::new(problem, y.clone(), s)?;
    Ok(ctx.alpha_bar)
}

/// Penalty division factor ξ_ᾱ(α) = 1 + αᾱ/(ᾱ − α).
pub fn xi(alpha_bar: f64, alpha: f64) -> Result<f64, GeometryError> {
    if !(0.0..alpha_bar).contains(&alpha) {
        return Err(GeometryError::StepAtBoundary { alpha, alpha_bar });
    }
    Ok(1.0 + alpha * alpha_bar / (alpha_bar - alpha))
}

/// Predictor step-length update: doubling far from ᾱ, halving the distance to
/// ᾱ once α ≥ ᾱ/3.
pub fn eta(alpha_bar: f64, alpha: f64) -> f64 {
    if alpha < alpha_bar / 3.0 {
        2.0 * alpha
    } else {
        0.5 * (alpha + alpha_bar)
    }
}

/// Γ_μ(y, α) as a standalone evaluation (builds the context each call).
pub fn big_gamma(
    problem: &ConicProblem,
    y: &Vec64,
    mu: f64,
    alpha: f64,
) -> Result<f64, GeometryError> {
    let s = problem.slack(y);
    let ctx = PredictorContext::new(problem, y.clone(), s)?;
    ctx.big_gamma(problem, mu, alpha)
}

/// Residuals of the central-path characterization at (y, μ) with the primal
/// candidate x = −μ∇F_*(s(y)).
#[derive(Debug, Clone)]
pub struct CentralPathResiduals {
    pub x: Vec64,
    /// ‖Ax − b‖
    pub primal_residual: f64,
    /// ⟨c, x⟩ − ⟨b, y⟩, evaluated in the cancellation-free form ⟨s, x⟩ + ⟨Ax − b, y⟩
    pub gap: f64,
    /// ν·μ, the exact gap on the central path
    pub nu_mu: f64,
}

pub fn central_path_residuals(
    problem: &ConicProblem,
    y: &Vec64,
    mu: f64,
) -> Result<CentralPathResiduals, GeometryError> {
    let s = problem.slack(y);
    let grad_slack = problem.oracle.gradient(&s)?;
    let x = -grad_slack * mu;
    let ax_b = problem.a.apply(&x) - &problem.b;
    let gap = s.dot(&x) + ax_b.dot(y);
    Ok(CentralPathResiduals {
        primal_residual: ax_b.norm(),
        gap,
        nu_mu: problem.nu() * mu,
        x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::ConeDescriptor;

    fn vec(v: &[f64]) -> Vec64 {
        Vec64::from_row_slice(v)
    }

    /// Q = {y ≤ 1} as orthant(1) slack: s = 1 − y, f(y) = F_*(1 − y).
    fn one_dim() -> ConicProblem {
        ConicProblem::new(
            LinearMap::new(Mat64::from_row_slice(1, 1, &[1.0])),
            vec(&[1.0]),
            vec(&[1.0]),
            ConeDescriptor::Orthant(1),
            vec(&[0.0]),
        )
        .unwrap()
    }

    fn disc(b: &[f64]) -> ConicProblem {
        ConicProblem::new(
            LinearMap::new(-Mat64::identity(2, 2)),
            vec(b),
            vec(&[0.0, 0.0]),
            ConeDescriptor::Disc2d,
            vec(&[0.0, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn slack_and_boundary_flag() {
        let p = one_dim();
        let (s, interior) = slack(&p, &vec(&[0.0]));
        assert_eq!(s[0], 1.0);
        assert!(interior);
        let (s, interior) = slack(&p, &vec(&[1.0]));
        assert_eq!(s[0], 0.0);
        assert!(!interior);
    }

    #[test]
    fn one_dim_derivatives() {
        let p = one_dim();
        let (_, g, h) = f_derivatives(&p, &vec(&[0.0])).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-14);
        assert!((h.matrix()[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn disc_derivatives_at_center() {
        let p = disc(&[1.0, 0.0]);
        let (_, g, h) = f_derivatives(&p, &vec(&[0.0, 0.0])).unwrap();
        assert!(g.amax() < 1e-15);
        assert!((h.matrix() - Mat64::identity(2, 2) * 2.0).amax() < 1e-15);
    }

    #[test]
    fn proximity_examples() {
        let p = one_dim();
        // exactly centered: y = 1 − μ
        for mu in [0.9, 0.5, 0.1, 0.01] {
            let gamma = proximity_gamma(&p, &vec(&[1.0 - mu]), mu).unwrap();
            assert!(gamma < 1e-12, "γ = {gamma} at μ = {mu}");
        }
        // off the path: γ = |1/(1−y) − 1/μ|·(1−y)
        let gamma = proximity_gamma(&p, &vec(&[0.5]), 1.0).unwrap();
        assert!((gamma - 0.5).abs() < 1e-14);
        // disc at the center with b = (1,0), μ = 1: γ = 1/√2
        let d = disc(&[1.0, 0.0]);
        let gamma = proximity_gamma(&d, &vec(&[0.0, 0.0]), 1.0).unwrap();
        assert!((gamma - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn theta_closed_forms() {
        let d = disc(&[1.0, 0.0]);
        // θ²(y) = 2y₂²/(1 − y₁² + y₂²)
        let y = vec(&[0.0, 0.3]);
        let expected = (2.0 * 0.09 / 1.09f64).sqrt();
        assert!((theta(&d, &y).unwrap() - expected).abs() < 1e-12);
        for t in [-0.7, -0.2, 0.0, 0.4, 0.9] {
            assert!(theta(&d, &vec(&[t, 0.0])).unwrap() < 1e-9);
        }
        // θ ≤ γ(·, μ) for every μ
        let y = vec(&[0.3, 0.4]);
        let th = theta(&d, &y).unwrap();
        for mu in [10.0, 1.0, 0.3, 0.05, 0.001] {
            assert!(th <= proximity_gamma(&d, &y, mu).unwrap() + 1e-12);
        }
    }

    #[test]
    fn prediction_closed_forms() {
        let p = one_dim();
        // prediction is exact for a linear boundary: p(y) = 1 for every y
        for y in [-2.0, 0.0, 0.9, 0.99] {
            let v = predictor_direction(&p, &vec(&[y])).unwrap();
            assert!((v[0] - (1.0 - y)).abs() < 1e-12);
            assert!((prediction_point(&p, &vec(&[y])).unwrap()[0] - 1.0).abs() < 1e-12);
        }
        // disc: p(y) = 2y/(1 + ‖y‖²)
        let d = disc(&[1.0, 0.0]);
        for y in [vec(&[0.5, 0.0]), vec(&[0.2, -0.4]), vec(&[-0.3, 0.6])] {
            let expect = &y * (2.0 / (1.0 + y.norm_squared()));
            assert!((prediction_point(&d, &y).unwrap() - expect).amax() < 1e-12);
        }
        assert!((prediction_point(&d, &vec(&[0.5, 0.0])).unwrap() - vec(&[0.8, 0.0])).amax() < 1e-12);
    }

    #[test]
    fn max_step_examples() {
        let p = one_dim();
        assert!((max_feasible_step(&p, &vec(&[0.0])).unwrap() - 1.0).abs() < 1e-12);
        let d = disc(&[1.0, 0.0]);
        // y = (0.5, 0): v = (0.3, 0), boundary at 0.5 + 0.3α = 1
        assert!((max_feasible_step(&d, &vec(&[0.5, 0.0])).unwrap() - 5.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn dikin_lower_bound_on_max_step() {
        let d = disc(&[1.0, 0.0]);
        let mut rng = crate::rng::stream(3, "dikin-low");
        for _ in 0..30 {
            let y = crate::cones::sampling::interior_point(&mut rng, &ConeDescriptor::Disc2d);
            let s = d.slack(&y);
            let ctx = PredictorContext::new(&d, y, s).unwrap();
            assert!(ctx.alpha_bar * ctx.v_local_norm >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn xi_and_eta_values() {
        assert_eq!(xi(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(xi(1.0, 0.5).unwrap(), 2.0);
        assert_eq!(xi(2.0, 1.0).unwrap(), 3.0);
        assert!(matches!(
            xi(1.0, 1.0),
            Err(GeometryError::StepAtBoundary { .. })
        ));
        // two algebraic forms of ξ agree
        for (ab, a) in [(1.3, 0.4), (2.0, 1.7), (0.8, 0.1)] {
            let lhs = xi(ab, a).unwrap();
            let rhs = 1.0 + a + a * a / (ab - a);
            assert!((lhs - rhs).abs() < 1e-12);
        }
        // ξ strictly increasing on [0, ᾱ)
        let mut prev = xi(1.5, 0.0).unwrap();
        for i in 1..100 {
            let a = 1.5 * (i as f64 / 100.0) * 0.999;
            let next = xi(1.5, a).unwrap();
            assert!(next > prev);
            prev = next;
        }

        assert_eq!(eta(1.0, 0.2), 0.4);
        assert_eq!(eta(1.0, 0.5), 0.75);
        assert_eq!(eta(1.0, 0.0), 0.0);
    }

    #[test]
    fn big_gamma_one_dim_worked_example() {
        // centered point y = 1 − μ at μ = 0.5: v = μ, ᾱ = 1, ξ(0.5) = 2,
        // ∇f(y(α)) = 2/μ = ξ/μ·b, so Γ = 0 up to rounding
        let p = one_dim();
        let mu = 0.5;
        let y = vec(&[1.0 - mu]);
        let g = big_gamma(&p, &y, mu, 0.5).unwrap();
        assert!(g < 1e-12, "Γ = {g}");
        // Γ → γ(y, μ) as α → 0, also away from the path
        let y_off = vec(&[0.3]);
        let gamma = proximity_gamma(&p, &y_off, mu).unwrap();
        let g0 = big_gamma(&p, &y_off, mu, 1e-9).unwrap();
        assert!((g0 - gamma).abs() < 1e-6 * (1.0 + gamma));
    }

    #[test]
    fn big_gamma_poly_chain_bound() {
        // Γ ≤ (1+α‖v‖)[2α²‖v‖²/(1−α‖v‖) + β(1 + α/(1−α‖v‖))] on a sharp LP
        let (p, _) = crate::generators::sharp_lp(2, 5, 42).unwrap();
        let config = crate::solver::SolverConfig::default();
        let init = crate::solver::initialize(&p, &config).unwrap();
        let ctx = PredictorContext::new(&p, init.y.clone(), init.slack.clone()).unwrap();
        let beta = init.gamma;
        let r = ctx.v_local_norm;
        let alpha0 = (1.0 / 6.0) * (1.0f64).min(1.0 / r);
        for frac in [0.2, 0.5, 1.0] {
            let alpha = alpha0 * frac;
            let gamma_big = ctx.big_gamma(&p, 1.0, alpha).unwrap();
            let bound = (1.0 + alpha * r)
                * (2.0 * alpha * alpha * r * r / (1.0 - alpha * r)
                    + beta * (1.0 + alpha / (1.0 - alpha * r)));
            assert!(
                gamma_big <= bound + 1e-10,
                "Γ = {gamma_big} > bound {bound} at α = {alpha}"
            );
        }
    }

    #[test]
    fn predicted_slack_and_null_identity() {
        let p = one_dim();
        let sp = predicted_slack(&p, &vec(&[0.0])).unwrap();
        assert!(sp[0].abs() < 1e-14);
        let (lp, _) = crate::generators::sharp_lp(3, 7, 5).unwrap();
        let y = lp.y_start().clone();
        let res = null_identity_residual(&lp, &y).unwrap();
        let scale = 1.0 + lp.slack(&y).norm();
        assert!(res <= 1e-8 * scale, "residual {res}");
    }

    #[test]
    fn central_path_residual_examples() {
        let p = one_dim();
        for mu in [1.0, 0.5, 0.1] {
            let r = central_path_residuals(&p, &vec(&[1.0 - mu]), mu).unwrap();
            assert!(r.primal_residual < 1e-12);
            assert!((r.gap - r.nu_mu).abs() < 1e-12 * (1.0 + r.nu_mu));
            assert!((r.gap - mu).abs() < 1e-12); // ν = 1
        }
    }

    #[test]
    fn infeasible_start_rejected() {
        let err = ConicProblem::new(
            LinearMap::new(Mat64::from_row_slice(1, 1, &[1.0])),
            vec(&[1.0]),
            vec(&[1.0]),
            ConeDescriptor::Orthant(1),
            vec(&[2.0]),
        )
        .unwrap_err();
        assert_eq!(err, GeometryError::InfeasibleStart);
    }

    #[test]
    fn rank_deficient_constraints_rejected() {
        let err = ConicProblem::new(
            LinearMap::new(Mat64::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0])),
            vec(&[1.0, 1.0]),
            vec(&[3.0, 3.0]),
            ConeDescriptor::Orthant(2),
            vec(&[0.0, 0.0]),
        )
        .unwrap_err();
        assert_eq!(err, GeometryError::SurjectivityViolated);
    }

    #[test]
    fn predictor_norm_bounded_by_nu() {
        let (p, _) = crate::generators::sharp_lp(3, 7, 11).unwrap();
        let mut rng = crate::rng::stream(8, "vnorm");
        let nu = p.nu();
        for _ in 0..20 {
            // random strictly feasible point near the start
            let dir = crate::cones::sampling::normal_vector(&mut rng, p.dim_y());
            let y = p.y_start() + dir * 0.05;
            if !p.slack_is_interior(&p.slack(&y)) {
                continue;
            }
            let s = p.slack(&y);
            let ctx = PredictorContext::new(&p, y, s).unwrap();
            assert!(ctx.v_local_norm <= nu.sqrt() + 1e-9);
        }
    }
}
