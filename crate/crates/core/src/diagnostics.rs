//! Numerical certification layer: fixed metrics B and G, regional estimates
//! of the sharpness constant γ_d and the boundedness constant σ_d, the
//! derived constants κ₁/κ₂/κ₃/κ and c₀/c₁, rate checks on traces, and
//! finite-difference/identity suites for the barrier oracles.

use crate::cones::{sampling, BarrierOracle, ConeDescriptor, Side};
use crate::geometry::{ConicProblem, GeometryError, KnownOptimum, LocalModel};
use crate::linalg::{Mat64, NormSide, SymOperator, Vec64};
use crate::rng;
use crate::solver::{center_to, ConvergenceTrace, SolveErrorKind, SolverConfig};
use rand::Rng;
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("trace does not contain a usable μ = 1 iterate")]
    MissingInitialIterate,
    #[error("no strictly feasible samples could be drawn")]
    NoSamples,
    #[error("known optimum required but not provided")]
    MissingOptimum,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("rate window too short: need {needed} pairs, have {got}")]
    WindowTooShort { needed: usize, got: usize },
    #[error("lemma hypothesis not satisfied: {0}")]
    HypothesisNotSatisfied(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("centering failed: {0}")]
    Centering(#[from] SolveErrorKind),
    #[error(transparent)]
    Cone(#[from] crate::cones::ConeError),
}

/// One report metric: `name=<..> value=<..> threshold=<..> status=PASS|FAIL`.
#[derive(Debug, Clone)]
pub struct MetricLine {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl MetricLine {
    /// A `pass` means the value stays at or below the threshold.
    pub fn upper(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        MetricLine {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

impl fmt::Display for MetricLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "name={} value={:.9e} threshold={:.9e} status={}",
            self.name,
            self.value,
            self.threshold,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// The fixed metrics of the analysis: B = ∇²F(x_μ)|_{μ=1} on E (computed as
/// the inverse of ∇²F_*(s₁)) and G = A B⁻¹ A* on H.
#[derive(Debug)]
pub struct Metrics {
    pub b_metric: SymOperator,
    pub g_metric: SymOperator,
    /// The re-centered μ = 1 iterate the metrics were built from.
    pub y1: Vec64,
    pub s1: Vec64,
}

/// Builds B and G from the trace's μ = 1 iterate, re-centered to γ ≤ 1e-10
/// first so the identities behind the construction hold to reporting
/// accuracy.
pub fn build_metrics(
    problem: &ConicProblem,
    trace: &ConvergenceTrace,
) -> Result<Metrics, DiagnosticsError> {
    build_metrics_from(problem, trace.initial.y.clone())
}

/// Same as [`build_metrics`] but from an explicit strictly feasible warm
/// start for the μ = 1 centering.
pub fn build_metrics_from(
    problem: &ConicProblem,
    y_warm: Vec64,
) -> Result<Metrics, DiagnosticsError> {
    if !problem.slack_is_interior(&problem.slack(&y_warm)) {
        return Err(DiagnosticsError::MissingInitialIterate);
    }
    let config = SolverConfig::default();
    let centered = center_to(problem, y_warm, 1.0, 1e-10, &config)?;
    let model = LocalModel::at_slack(problem, &centered.s)?;
    let b_metric = model.hess_slack.inverse().map_err(GeometryError::from)?;
    // G = A B⁻¹ A* with B⁻¹ = ∇²F_*(s₁), i.e. exactly ∇²f(y₁)
    let g_metric = SymOperator::from_symmetric(model.hess.matrix().clone());
    g_metric.factorize().map_err(GeometryError::from)?;
    Ok(Metrics {
        b_metric,
        g_metric,
        y1: centered.y,
        s1: centered.s,
    })
}

/// Randomized check of the operator bounds ‖A‖_{G,B} ≤ 1 and ‖b‖_G ≤ √ν.
pub fn operator_bound_report(
    problem: &ConicProblem,
    metrics: &Metrics,
    seed: u64,
    probes: usize,
) -> Result<Vec<MetricLine>, DiagnosticsError> {
    let mut rng = rng::stream(seed, "operator-bound-probes");
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let h = sampling::normal_vector(&mut rng, problem.dim_slack());
        let ah = problem.a().apply(&h);
        let num = metrics
            .g_metric
            .weighted_norm(&ah, NormSide::Dual)
            .map_err(GeometryError::from)?;
        let den = metrics
            .b_metric
            .weighted_norm(&h, NormSide::Primal)
            .map_err(GeometryError::from)?;
        worst = worst.max(num / den);
    }
    let b_norm = metrics
        .g_metric
        .weighted_norm(problem.b(), NormSide::Dual)
        .map_err(GeometryError::from)?;
    Ok(vec![
        MetricLine::upper("operator_norm_a_gb", worst, 1.0 + 1e-8),
        MetricLine::upper("norm_b_g", b_norm, problem.nu().sqrt() + 1e-8),
    ])
}

#[derive(Debug, Clone)]
pub struct GammaDEstimate {
    /// Regional lower estimate of the sharpness constant.
    pub lower_estimate: f64,
    pub samples: usize,
    /// (distance, ratio) per accepted sample.
    pub per_scale: Vec<(f64, f64)>,
}

/// The default sample policy: a geometric ladder of 30 scales from 1e-1 down
/// to 1e-8 around y_*, 8 random directions per scale, keeping the strictly
/// feasible points.
pub fn gamma_d_ladder_samples(
    problem: &ConicProblem,
    y_star: &Vec64,
    seed: u64,
) -> Vec<Vec64> {
    let mut rng = rng::stream(seed, "gamma-d-ladder");
    let m = problem.dim_y();
    let mut out = Vec::new();
    let scales = 30;
    for i in 0..scales {
        let t = i as f64 / (scales - 1) as f64;
        let delta = 10f64.powf(-1.0 - 7.0 * t);
        for _ in 0..8 {
            let dir = sampling::normal_vector(&mut rng, m).normalize();
            let y = y_star + dir * delta;
            if problem.slack_is_interior(&problem.slack(&y)) {
                out.push(y);
            }
        }
    }
    out
}

/// Minimum gap/distance ratio over explicit feasible samples: a regional
/// lower estimate of the sharpness constant γ_d. The true constant is global;
/// the estimate only certifies the sampled region, and a ratio that decays
/// with the sample scale flags the absence of a sharp maximum.
pub fn estimate_gamma_d_over(
    problem: &ConicProblem,
    optimum: &KnownOptimum,
    g_metric: &SymOperator,
    samples: &[Vec64],
) -> Result<GammaDEstimate, DiagnosticsError> {
    let mut best = f64::INFINITY;
    let mut used = 0;
    let mut per_scale = Vec::new();
    for y in samples {
        if !problem.slack_is_interior(&problem.slack(y)) {
            continue;
        }
        let dist = g_metric
            .weighted_norm(&(y - &optimum.y_star), NormSide::Primal)
            .map_err(GeometryError::from)?;
        if dist <= 1e-10 {
            continue;
        }
        let gap = optimum.f_star - problem.dual_objective(y);
        let ratio = gap / dist;
        best = best.min(ratio);
        per_scale.push((dist, ratio));
        used += 1;
    }
    if used == 0 {
        return Err(DiagnosticsError::NoSamples);
    }
    Ok(GammaDEstimate {
        lower_estimate: best,
        samples: used,
        per_scale,
    })
}

/// [`estimate_gamma_d_over`] on the default radial ladder.
pub fn estimate_gamma_d(
    problem: &ConicProblem,
    optimum: &KnownOptimum,
    g_metric: &SymOperator,
    seed: u64,
) -> Result<GammaDEstimate, DiagnosticsError> {
    let samples = gamma_d_ladder_samples(problem, &optimum.y_star, seed);
    estimate_gamma_d_over(problem, optimum, g_metric, &samples)
}

#[derive(Debug, Clone)]
pub struct SigmaDEstimate {
    pub max_norm: f64,
    /// (μ, ‖∇²F_*(s_μ)s_*‖_B) per inspected iterate.
    pub per_iterate: Vec<(f64, f64)>,
    /// Growth ∝ 1/μ signals a violated boundedness assumption.
    pub diverging: bool,
}

/// Estimates σ_d = sup_μ ‖∇²F_*(s_μ)s_*‖_B over near-centered iterates given
/// as (slack, μ) pairs.
pub fn estimate_sigma_d(
    problem: &ConicProblem,
    iterates: &[(Vec64, f64)],
    s_star: &Vec64,
    b_metric: &SymOperator,
) -> Result<SigmaDEstimate, DiagnosticsError> {
    let mut per_iterate = Vec::new();
    for (s, mu) in iterates {
        let hess_slack = problem.oracle().hessian(s)?;
        let w = hess_slack.matrix() * s_star;
        let norm = b_metric
            .weighted_norm(&w, NormSide::Primal)
            .map_err(GeometryError::from)?;
        per_iterate.push((*mu, norm));
    }
    if per_iterate.is_empty() {
        return Err(DiagnosticsError::MissingOptimum);
    }
    let max_norm = per_iterate.iter().map(|p| p.1).fold(0.0f64, f64::max);
    // regress log‖·‖ against log(1/μ) over the tail; slope near 1 means the
    // quantity grows like β/μ would under a violated assumption
    let pts: Vec<(f64, f64)> = per_iterate
        .iter()
        .filter(|(mu, v)| *mu <= 0.5 && *v > 0.0)
        .map(|(mu, v)| ((1.0 / mu).ln(), v.ln()))
        .collect();
    let diverging = if pts.len() >= 3 {
        least_squares_slope(&pts).0 > 0.5
    } else {
        false
    };
    Ok(SigmaDEstimate {
        max_norm,
        per_iterate,
        diverging,
    })
}

/// [`estimate_sigma_d`] over the iterates a solve trace recorded.
pub fn sigma_d_from_trace(
    problem: &ConicProblem,
    trace: &ConvergenceTrace,
    s_star: &Vec64,
    b_metric: &SymOperator,
) -> Result<SigmaDEstimate, DiagnosticsError> {
    let mut iterates = vec![(trace.initial.slack.clone(), 1.0)];
    iterates.extend(trace.records.iter().map(|r| (r.slack.clone(), r.mu)));
    estimate_sigma_d(problem, &iterates, s_star, b_metric)
}

/// Walks the central path down a μ ladder, re-centering to `gamma_tol` at
/// each value with the previous point as warm start.
pub fn centered_path(
    problem: &ConicProblem,
    mus: &[f64],
    gamma_tol: f64,
) -> Result<Vec<crate::geometry::PathIterate>, DiagnosticsError> {
    let config = SolverConfig::default();
    let mut y = problem.y_start().clone();
    let mut out = Vec::with_capacity(mus.len());
    for &mu in mus {
        let it = center_to(problem, y.clone(), mu, gamma_tol, &config)?;
        y = it.y.clone();
        out.push(it);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa: f64,
}

/// κ₁ = ν + β(β+√ν)/(1−β), κ₂ = (2/γ_d)(σ_d + 6ν²β/μ), κ = κ₁κ₂,
/// κ₃ = κ₂(1/r + 2√ν/γ_d).
pub fn constants(
    nu: f64,
    gamma_d: f64,
    sigma_d: f64,
    beta: f64,
    mu: f64,
    r: f64,
) -> Result<Constants, DiagnosticsError> {
    if !(0.0..=1.0 / 9.0).contains(&beta) {
        return Err(DiagnosticsError::ParameterOutOfRange(format!(
            "beta = {beta} not in [0, 1/9]"
        )));
    }
    if mu <= 0.0 || mu > 1.0 || mu.is_nan() {
        return Err(DiagnosticsError::ParameterOutOfRange(format!(
            "mu = {mu} not in (0, 1]"
        )));
    }
    if r <= 0.0 || r >= 1.0 || r.is_nan() {
        return Err(DiagnosticsError::ParameterOutOfRange(format!(
            "r = {r} not in (0, 1)"
        )));
    }
    if gamma_d <= 0.0 || gamma_d.is_nan() {
        return Err(DiagnosticsError::ParameterOutOfRange(format!(
            "gamma_d = {gamma_d} must be positive"
        )));
    }
    let kappa1 = crate::solver::kappa1(nu, beta);
    let kappa2 = (2.0 / gamma_d) * (sigma_d + 6.0 * nu * nu * beta / mu);
    let kappa = kappa1 * kappa2;
    let kappa3 = kappa2 * (1.0 / r + 2.0 * nu.sqrt() / gamma_d);
    Ok(Constants {
        kappa1,
        kappa2,
        kappa3,
        kappa,
    })
}

/// c₀ of the superlinear analysis, with β_k = μ_k/25 folded in.
pub fn c0_constant(nu: f64, gamma_d: f64, sigma_d: f64, kappa1: f64, kappa: f64) -> f64 {
    kappa * nu.sqrt()
        + (2.0 * kappa1 / gamma_d)
            * (sigma_d
                + (6.0 / 25.0) * nu * nu
                + 2.0 * kappa * nu * (1.0 + 2.0 * nu.sqrt()) * (1.0 - 1.0 / 25.0)
                    / (1.0 - 2.0 / 25.0))
}

/// c₁ = β′/((1 + 2√ν)(c₀ + 7/225)); the superlinear law is μ₊ ≤ 9μ^{3/2}/√c₁.
pub fn c1_constant(nu: f64, c0: f64, beta_prime: f64) -> f64 {
    beta_prime / ((1.0 + 2.0 * nu.sqrt()) * (c0 + 7.0 / 225.0))
}

/// Unique positive root of c₀ξ² + (1/25)(1 + 2ξ) = β′/((1 + 2√ν)μ).
pub fn xi_equation_root(c0: f64, nu: f64, beta_prime: f64, mu: f64) -> f64 {
    let rhs = beta_prime / ((1.0 + 2.0 * nu.sqrt()) * mu);
    let b = 2.0 / 25.0;
    let c = 1.0 / 25.0 - rhs;
    let mut xi = (-b + (b * b - 4.0 * c0 * c).max(0.0).sqrt()) / (2.0 * c0);
    // one Newton polish to push the residual to rounding level
    for _ in 0..2 {
        let f = c0 * xi * xi + b * xi + c;
        let df = 2.0 * c0 * xi + b;
        xi -= f / df;
    }
    xi
}

/// Per-step flags for μ_{k+1} ≤ (1 + 1/(6√ν))⁻¹ μ_k.
pub fn check_linear_rate(mus: &[f64], nu: f64) -> Vec<bool> {
    let factor = 1.0 / (1.0 + 1.0 / (6.0 * nu.sqrt()));
    mus.windows(2)
        .map(|w| w[1] <= factor * w[0] * (1.0 + 1e-12))
        .collect()
}

#[derive(Debug, Clone)]
pub struct TailWindow {
    /// Only pairs with μ_k at or below this enter the fit.
    pub mu_upper: f64,
    /// Pairs that fell to the f64 floor are excluded.
    pub mu_floor: f64,
    /// If fewer pairs qualify, the window is extended backwards to this many.
    pub min_pairs: usize,
}

impl Default for TailWindow {
    fn default() -> Self {
        TailWindow {
            mu_upper: 1e-4,
            mu_floor: 1e-12,
            min_pairs: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RateReport {
    pub linear_rate_ok: Vec<bool>,
    pub tail_exponent: f64,
    pub tail_constant: f64,
    /// Index range of the pairs used in the fit.
    pub window: (usize, usize),
    pub pairs: usize,
}

/// Least-squares fit of log μ_{k+1} against log μ_k over the tail window;
/// the per-step linear-rate flags stay empty when ν is not known.
pub fn fit_tail_exponent(
    mus: &[f64],
    window: &TailWindow,
) -> Result<RateReport, DiagnosticsError> {
    let n_pairs = mus.len().saturating_sub(1);
    let usable: Vec<usize> = (0..n_pairs)
        .filter(|&k| mus[k + 1] >= window.mu_floor)
        .collect();
    let mut chosen: Vec<usize> = usable
        .iter()
        .copied()
        .filter(|&k| mus[k] <= window.mu_upper)
        .collect();
    // A fast superlinear tail can cross the window in fewer steps than the
    // fit needs; extend backwards over the immediately preceding pairs.
    let mut extend = usable
        .iter()
        .copied()
        .filter(|k| !chosen.contains(k))
        .collect::<Vec<_>>();
    while chosen.len() < window.min_pairs {
        match extend.pop() {
            Some(k) => chosen.insert(0, k),
            None => break,
        }
    }
    if chosen.len() < 4 {
        return Err(DiagnosticsError::WindowTooShort {
            needed: 4,
            got: chosen.len(),
        });
    }
    let pts: Vec<(f64, f64)> = chosen
        .iter()
        .map(|&k| (mus[k].ln(), mus[k + 1].ln()))
        .collect();
    let (slope, intercept) = least_squares_slope(&pts);
    Ok(RateReport {
        linear_rate_ok: Vec::new(),
        tail_exponent: slope,
        tail_constant: intercept.exp(),
        window: (
            *chosen.first().unwrap(),
            *chosen.last().unwrap(),
        ),
        pairs: chosen.len(),
    })
}

/// Full rate report: per-step linear-rate flags plus the fitted tail law.
pub fn rate_report(
    mus: &[f64],
    nu: f64,
    window: &TailWindow,
) -> Result<RateReport, DiagnosticsError> {
    let mut report = fit_tail_exponent(mus, window)?;
    report.linear_rate_ok = check_linear_rate(mus, nu);
    Ok(report)
}

fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in pts {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    let slope = cov / var;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Gradient,
    Hessian,
    Third,
}

impl FdOrder {
    pub fn threshold(self) -> f64 {
        match self {
            FdOrder::Gradient => 1e-6,
            FdOrder::Hessian => 1e-5,
            FdOrder::Third => 1e-4,
        }
    }
}

/// Central finite-difference cross-check of the oracle derivatives at one
/// interior point; returns the maximal relative error over seeded probes.
pub fn fd_check(
    oracle: &BarrierOracle,
    x: &Vec64,
    order: FdOrder,
    seed: u64,
) -> Result<f64, DiagnosticsError> {
    if !oracle.is_interior(x) {
        return Err(GeometryError::OutsideCone.into());
    }
    let mut rng = rng::stream(seed, "fd-probes");
    let n = x.len();
    let mut worst = 0.0f64;
    let probes = 6.min(n).max(2);
    match order {
        FdOrder::Gradient => {
            let h = 1e-5 * (1.0 + x.norm());
            let grad = oracle.gradient(x)?;
            for _ in 0..probes {
                let u = sampling::normal_vector(&mut rng, n).normalize();
                let fp = oracle.value(&(x + &u * h))?;
                let fm = oracle.value(&(x - &u * h))?;
                let fd = (fp - fm) / (2.0 * h);
                let exact = grad.dot(&u);
                worst = worst.max((fd - exact).abs() / (1.0 + exact.abs()));
            }
        }
        FdOrder::Hessian => {
            let h = 1e-5 * (1.0 + x.norm());
            let hess = oracle.hessian(x)?;
            for _ in 0..probes {
                let u = sampling::normal_vector(&mut rng, n).normalize();
                let gp = oracle.gradient(&(x + &u * h))?;
                let gm = oracle.gradient(&(x - &u * h))?;
                let fd = (gp - gm) / (2.0 * h);
                let exact = hess.matrix() * &u;
                worst = worst.max((&fd - &exact).norm() / (1.0 + exact.norm()));
            }
        }
        FdOrder::Third => {
            let h = 1e-4 * (1.0 + x.norm());
            for _ in 0..probes {
                let u = sampling::normal_vector(&mut rng, n).normalize();
                let third = oracle.third_directional(x, &u)?;
                let hp = oracle.hessian(&(x + &u * h))?;
                let hm = oracle.hessian(&(x - &u * h))?;
                let fd = (hp.matrix() - hm.matrix()) / (2.0 * h);
                let scale = 1.0 + third.matrix().amax();
                worst = worst.max((&fd - third.matrix()).amax() / scale);
            }
        }
    }
    Ok(worst)
}

/// Eigenvalue test of H ⪰ ∇²F(x)/(4ν²) in the ∇²F(x) scaling, after
/// verifying the lemma's hypotheses (ellipsoid containment and the gradient
/// inequality) numerically.
pub fn check_lemma_ell(
    oracle: &BarrierOracle,
    x: &Vec64,
    u: &Vec64,
    h_op: &SymOperator,
    seed: u64,
) -> Result<bool, DiagnosticsError> {
    let grad = oracle.gradient(x)?;
    if grad.dot(&(u - x)) < -1e-9 * (1.0 + grad.norm() * u.norm()) {
        return Err(DiagnosticsError::HypothesisNotSatisfied(
            "⟨∇F(x), u − x⟩ < 0".into(),
        ));
    }
    // sample boundary points of the H-ellipsoid around u
    let chol = h_op.factorize().map_err(GeometryError::from)?;
    let lt = chol.l().transpose();
    let mut rng = rng::stream(seed, "lemma-ell-boundary");
    for _ in 0..32 {
        let z = sampling::normal_vector(&mut rng, x.len()).normalize();
        let w = lt
            .solve_upper_triangular(&z)
            .ok_or(GeometryError::RankDeficient)?;
        let point = u + w;
        if !oracle.cone().contains(&point, 1e-9) {
            return Err(DiagnosticsError::HypothesisNotSatisfied(
                "ellipsoid E_H(u) is not contained in the cone".into(),
            ));
        }
    }
    let nu = oracle.nu();
    let hess = oracle.hessian(x)?;
    let m_chol = hess.factorize().map_err(GeometryError::from)?;
    let l = m_chol.l();
    // λ_min(L⁻¹ H L⁻ᵀ) ≥ 1/(4ν²) − 1e-9
    let half = l
        .solve_lower_triangular(h_op.matrix())
        .ok_or(GeometryError::RankDeficient)?;
    let scaled = l
        .solve_lower_triangular(&half.transpose())
        .ok_or(GeometryError::RankDeficient)?;
    let lam_min = scaled
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(lam_min >= 1.0 / (4.0 * nu * nu) - 1e-9)
}

/// The barrier identity suite for one cone: log-homogeneity identities,
/// ‖∇F(x)‖²_x = ν, self-concordance spot check, and the finite-difference
/// agreements, each reported as a metric line.
pub fn barrier_identity_report(
    cone: &ConeDescriptor,
    seed: u64,
    samples: usize,
) -> Result<Vec<MetricLine>, DiagnosticsError> {
    let side = if matches!(
        cone,
        ConeDescriptor::HankelPoly(_) | ConeDescriptor::Parabola2d | ConeDescriptor::Disc2d
    ) {
        Side::Dual
    } else {
        Side::Primal
    };
    let oracle = BarrierOracle::new(cone.clone(), side)?;
    let nu = oracle.nu();
    let homogeneous = cone.is_cone();
    let mut rng = rng::stream(seed, "identity-suite");
    let mut e_gx = 0.0f64;
    let mut e_hx = 0.0f64;
    let mut e_3x = 0.0f64;
    let mut e_ndec = 0.0f64;
    let mut e_gt = 0.0f64;
    let mut e_ht = 0.0f64;
    let mut e_lh = 0.0f64;
    let mut e_sc = 0.0f64;
    for _ in 0..samples {
        let x = sampling::interior_point(&mut rng, cone);
        let val = oracle.value(&x)?;
        let grad = oracle.gradient(&x)?;
        let hess = oracle.hessian(&x)?;
        if homogeneous {
            // ⟨∇F(x), x⟩ = −ν
            e_gx = e_gx.max((grad.dot(&x) + nu).abs() / nu);
            // ∇²F(x)x = −∇F(x)
            let hx = hess.matrix() * &x;
            e_hx = e_hx.max((&hx + &grad).norm() / (1.0 + grad.norm()));
            // ∇³F(x)[x] = −2∇²F(x)
            let t = oracle.third_directional(&x, &x)?;
            e_3x = e_3x.max(
                (t.matrix() + 2.0 * hess.matrix()).amax() / (1.0 + hess.matrix().amax()),
            );
            // ‖∇F(x)‖²_x = ν
            let nd = hess.inv_quad_form(&grad).map_err(GeometryError::from)?;
            e_ndec = e_ndec.max((nd - nu).abs() / nu);
            for tau in [0.5, 2.0, 10.0] {
                let xt = &x * tau;
                let gt = oracle.gradient(&xt)?;
                e_gt = e_gt.max((&gt - &grad / tau).norm() / (1.0 + grad.norm()));
                let ht = oracle.hessian(&xt)?;
                e_ht = e_ht.max(
                    (ht.matrix() - hess.matrix() / (tau * tau)).amax()
                        / (1.0 + hess.matrix().amax()),
                );
                let vt = oracle.value(&xt)?;
                e_lh = e_lh.max((vt - (val - nu * tau.ln())).abs() / (1.0 + val.abs()));
            }
        }
        // |∇³F(x)[h,h,h]| ≤ 2⟨∇²F(x)h,h⟩^{3/2}
        let h = sampling::normal_vector(&mut rng, x.len());
        let t = oracle.third_directional(&x, &h)?;
        let cubic = (t.matrix() * &h).dot(&h).abs();
        let bound = 2.0 * hess.quad_form(&h).max(0.0).powf(1.5);
        e_sc = e_sc.max((cubic - bound) / (1.0 + bound));
    }
    let mut lines = Vec::new();
    if homogeneous {
        lines.push(MetricLine::upper("identity_grad_x", e_gx, 1e-8));
        lines.push(MetricLine::upper("identity_hess_x", e_hx, 1e-8));
        lines.push(MetricLine::upper("identity_third_x", e_3x, 1e-8));
        lines.push(MetricLine::upper("identity_norm_decrement", e_ndec, 1e-8));
        lines.push(MetricLine::upper("homogeneity_gradient", e_gt, 1e-8));
        lines.push(MetricLine::upper("homogeneity_hessian", e_ht, 1e-8));
        lines.push(MetricLine::upper("homogeneity_value", e_lh, 1e-8));
    }
    lines.push(MetricLine::upper("self_concordance_excess", e_sc, 1e-6));
    // finite-difference agreement at a fresh interior point
    let x = sampling::interior_point(&mut rng, cone);
    lines.push(MetricLine::upper(
        "fd_gradient",
        fd_check(&oracle, &x, FdOrder::Gradient, seed ^ 1)?,
        FdOrder::Gradient.threshold(),
    ));
    lines.push(MetricLine::upper(
        "fd_hessian",
        fd_check(&oracle, &x, FdOrder::Hessian, seed ^ 2)?,
        FdOrder::Hessian.threshold(),
    ));
    lines.push(MetricLine::upper(
        "fd_third",
        fd_check(&oracle, &x, FdOrder::Third, seed ^ 3)?,
        FdOrder::Third.threshold(),
    ));
    Ok(lines)
}

/// Negative-curvature suite for a cone family: the pairing ⟨∇³F(x)[h,h], u⟩
/// must stay nonpositive for u ∈ K, the Hessian must map K into K* (pairing
/// nonnegative), the gradient shift must stay dominated, and the two-sided
/// Hessian sandwich under a step must hold.
pub fn negative_curvature_report(
    cone: &ConeDescriptor,
    seed: u64,
    samples: usize,
) -> Result<Vec<MetricLine>, DiagnosticsError> {
    if !cone.is_cone() {
        return Err(DiagnosticsError::ParameterOutOfRange(format!(
            "{cone} is not a cone"
        )));
    }
    let side = if matches!(cone, ConeDescriptor::HankelPoly(_)) {
        Side::Dual
    } else {
        Side::Primal
    };
    let oracle = BarrierOracle::new(cone.clone(), side)?;
    let mut rng = rng::stream(seed, "negative-curvature");
    let mut worst_nc3 = f64::NEG_INFINITY;
    let mut worst_mon = f64::NEG_INFINITY;
    let mut worst_shift = f64::NEG_INFINITY;
    let mut worst_sandwich = 0.0f64;
    for _ in 0..samples {
        let x = sampling::interior_point(&mut rng, cone);
        let h = sampling::normal_vector(&mut rng, x.len());
        // pairing partners live in the cone the barrier domain is built on
        let u = sampling::domain_member(&mut rng, cone, side).expect("cone families only");
        let scale = (1.0 + u.norm()) * (1.0 + h.norm_squared());

        // ⟨∇³F(x)[h,h], u⟩ ≤ 0
        let t = oracle.third_directional(&x, &h)?;
        worst_nc3 = worst_nc3.max((t.matrix() * &h).dot(&u) / scale);

        // ⟨∇²F(x)k, u⟩ ≥ 0 for k in the domain cone
        let k_dir = sampling::domain_member(&mut rng, cone, side).expect("cone families only");
        let hess = oracle.hessian(&x)?;
        worst_mon = worst_mon.max(-(hess.matrix() * &k_dir).dot(&u) / scale);

        // ∇F(x+h) − ∇F(x) dominated by ∇²F(x)h for feasible x+h
        let step = sampling::domain_member(&mut rng, cone, side).expect("cone families only");
        let xh = &x + &step;
        let shift = oracle.gradient(&xh)? - oracle.gradient(&x)?;
        let dominated = hess.matrix() * &step;
        worst_shift = worst_shift.max((&shift - &dominated).dot(&u) / scale);

        // Hessian sandwich along x + αh with x + h interior
        let mut inner = sampling::interior_point(&mut rng, cone);
        inner = &x + (&inner - &x) * 0.5;
        let dir = &inner - &x;
        let sigma = oracle.sigma_measure(&x, &dir)?;
        let alpha = 0.2 + 0.6 * rng.random::<f64>();
        let hess_alpha = oracle.hessian(&(&x + &dir * alpha))?;
        for _ in 0..4 {
            let w = sampling::normal_vector(&mut rng, x.len());
            let q0 = hess.quad_form(&w);
            let qa = hess_alpha.quad_form(&w);
            let lower = q0 / (1.0 + alpha * sigma).powi(2);
            let upper = q0 / (1.0 - alpha).powi(2);
            worst_sandwich = worst_sandwich.max((lower - qa) / q0).max((qa - upper) / q0);
        }
    }
    Ok(vec![
        MetricLine::upper("nc3_pairing", worst_nc3, 1e-9),
        MetricLine::upper("hessian_monotone_pairing", worst_mon, 1e-9),
        MetricLine::upper("gradient_shift_pairing", worst_shift, 1e-9),
        MetricLine::upper("hessian_sandwich_excess", worst_sandwich, 1e-8),
    ])
}

/// Dikin containment and recession-direction bound spot checks.
pub fn dikin_recession_report(
    cone: &ConeDescriptor,
    seed: u64,
    samples: usize,
) -> Result<Vec<MetricLine>, DiagnosticsError> {
    let side = if matches!(cone, ConeDescriptor::HankelPoly(_)) {
        Side::Dual
    } else {
        Side::Primal
    };
    let oracle = BarrierOracle::new(cone.clone(), side)?;
    let mut rng = rng::stream(seed, "dikin-recession");
    let mut dikin_violations = 0usize;
    let mut worst_trdp = f64::NEG_INFINITY;
    let mut worst_trdd = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = sampling::interior_point(&mut rng, cone);
        let hess = oracle.hessian(&x)?;
        let chol = hess.factorize().map_err(GeometryError::from)?;
        let z = sampling::normal_vector(&mut rng, x.len()).normalize();
        let w = chol
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .ok_or(GeometryError::RankDeficient)?;
        let boundary_point = &x + &w * 0.99;
        if !cone.contains(&boundary_point, 1e-9) {
            dikin_violations += 1;
        }
        let (domain_cone_elt, pairing_elt) = (
            sampling::domain_member(&mut rng, cone, side),
            match side {
                Side::Primal => sampling::dual_cone_member(&mut rng, cone),
                Side::Dual => sampling::cone_member(&mut rng, cone),
            },
        );
        // ‖u‖_x ≤ ⟨−∇F(x), u⟩ for u a recession direction of the domain
        if let Some(u) = domain_cone_elt {
            let grad = oracle.gradient(&x)?;
            let nrm = hess.quad_form(&u).max(0.0).sqrt();
            worst_trdp = worst_trdp.max((nrm + grad.dot(&u)) / (1.0 + nrm));
        }
        // ‖s‖_x ≤ ⟨s, x⟩ for s in the dual of the domain cone
        if let Some(s) = pairing_elt {
            let nrm = hess.inv_quad_form(&s).map_err(GeometryError::from)?.max(0.0).sqrt();
            worst_trdd = worst_trdd.max((nrm - s.dot(&x)) / (1.0 + nrm));
        }
    }
    Ok(vec![
        MetricLine::upper("dikin_violations", dikin_violations as f64, 0.0),
        MetricLine::upper("recession_bound_primal_excess", worst_trdp, 1e-9),
        MetricLine::upper("recession_bound_dual_excess", worst_trdd, 1e-9),
    ])
}

/// Probe-based operator norm ‖M‖_B = max ‖Mh‖_B/‖h‖_B over randomized h;
/// full eigendecompositions are avoided above desk scale.
pub fn probe_operator_norm(
    m: &Mat64,
    b_metric: &SymOperator,
    rng: &mut impl Rng,
    probes: usize,
) -> Result<f64, DiagnosticsError> {
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let h = sampling::normal_vector(rng, m.ncols());
        let mh = m * &h;
        let num = b_metric
            .weighted_norm(&mh, NormSide::Primal)
            .map_err(GeometryError::from)?;
        let den = b_metric
            .weighted_norm(&h, NormSide::Dual)
            .map_err(GeometryError::from)?;
        if den > 0.0 {
            worst = worst.max(num / den);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::ConeDescriptor;
    use crate::generators;
    use crate::linalg::LinearMap;
    use crate::solver::{solve, SolverConfig};
    use nalgebra::DMatrix;

    fn vec(v: &[f64]) -> Vec64 {
        Vec64::from_row_slice(v)
    }

    fn one_dim() -> ConicProblem {
        ConicProblem::new(
            LinearMap::new(DMatrix::from_row_slice(1, 1, &[1.0])),
            vec(&[1.0]),
            vec(&[1.0]),
            ConeDescriptor::Orthant(1),
            vec(&[0.0]),
        )
        .unwrap()
    }

    #[test]
    fn constants_formulas() {
        // β = 0 collapses κ₁ to ν
        let c = constants(3.0, 1.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        assert_eq!(c.kappa1, 3.0);
        // ν=2, β=1/25, μ=1, γ_d=1, σ_d=1, r=1/2
        let c = constants(2.0, 1.0, 1.0, 1.0 / 25.0, 1.0, 0.5).unwrap();
        let k1 = 2.0 + (1.0 / 25.0) * (1.0 / 25.0 + 2f64.sqrt()) / (24.0 / 25.0);
        let k2 = 2.0 * (1.0 + 6.0 * 4.0 / 25.0);
        assert!((c.kappa1 - k1).abs() < 1e-15);
        assert!((c.kappa2 - k2).abs() < 1e-15);
        assert!((c.kappa3 - k2 * (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((c.kappa - c.kappa1 * c.kappa2).abs() < 1e-12);
        // range checks
        assert!(matches!(
            constants(2.0, 1.0, 1.0, 0.2, 1.0, 0.5),
            Err(DiagnosticsError::ParameterOutOfRange(_))
        ));
        assert!(matches!(
            constants(2.0, 1.0, 1.0, 0.01, 1.5, 0.5),
            Err(DiagnosticsError::ParameterOutOfRange(_))
        ));
        assert!(matches!(
            constants(2.0, 0.0, 1.0, 0.01, 1.0, 0.5),
            Err(DiagnosticsError::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn xi_root_properties() {
        for (c0, nu, mu) in [(1.0, 4.0, 0.01), (12.5, 2.0, 1e-6), (0.3, 9.0, 1e-3)] {
            let xi = xi_equation_root(c0, nu, 1.0 / 6.0, mu);
            assert!(xi > 0.0);
            let rhs = (1.0 / 6.0) / ((1.0 + 2.0 * nu.sqrt()) * mu);
            let residual = c0 * xi * xi + (1.0 / 25.0) * (1.0 + 2.0 * xi) - rhs;
            assert!(residual.abs() <= 1e-12 * rhs.max(1.0), "residual {residual}");
        }
        // dominant-rhs asymptotics: root ~ √(rhs/c0)
        let xi = xi_equation_root(2.0, 4.0, 1.0 / 6.0, 1e-12);
        let rhs: f64 = (1.0 / 6.0) / (5.0 * 1e-12);
        assert!((xi / (rhs / 2.0).sqrt() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn linear_rate_flags() {
        let flags = check_linear_rate(&[1.0, 0.5, 0.2], 4.0);
        assert_eq!(flags, vec![true, true]);
        let flags = check_linear_rate(&[1.0, 1.0, 1.0], 4.0);
        assert_eq!(flags, vec![false, false]);
    }

    #[test]
    fn tail_fit_synthetic_laws() {
        // exact power law μ⁺ = μ^1.5
        let mut mus: Vec<f64> = vec![0.9];
        while *mus.last().unwrap() > 1e-13 {
            mus.push(mus.last().copied().unwrap().powf(1.5));
        }
        let r = fit_tail_exponent(&mus, &TailWindow::default()).unwrap();
        assert!((r.tail_exponent - 1.5).abs() < 1e-6, "{}", r.tail_exponent);

        // exact linear law μ⁺ = μ/2
        let mus: Vec<f64> = (0..45).map(|k| 0.5f64.powi(k)).collect();
        let r = fit_tail_exponent(&mus, &TailWindow::default()).unwrap();
        assert!((r.tail_exponent - 1.0).abs() < 1e-6);
        assert!((r.tail_constant - 0.5).abs() < 1e-6);

        // too short
        assert!(matches!(
            fit_tail_exponent(&[1.0, 0.5, 0.2], &TailWindow::default()),
            Err(DiagnosticsError::WindowTooShort { .. })
        ));
    }

    #[test]
    fn metrics_on_orthant_instance() {
        let (p, _) = generators::sharp_lp(3, 6, 31).unwrap();
        let metrics = build_metrics_from(&p, p.y_start().clone()).unwrap();
        // B = [∇²F_*(s₁)]⁻¹ = diag(s₁ᵢ²) for the orthant
        for (i, s) in metrics.s1.iter().enumerate() {
            assert!(
                (metrics.b_metric.matrix()[(i, i)] - s * s).abs() < 1e-10 * s * s,
                "B diagonal off at {i}"
            );
        }
        let lines = operator_bound_report(&p, &metrics, 17, 64).unwrap();
        for line in &lines {
            assert!(line.pass, "{line}");
        }
    }

    #[test]
    fn gamma_d_one_dim_matches_scaling() {
        let p = one_dim();
        let metrics = build_metrics_from(&p, vec(&[0.0])).unwrap();
        let optimum = KnownOptimum {
            y_star: vec(&[1.0]),
            s_star: vec(&[0.0]),
            x_star: Some(vec(&[1.0])),
            f_star: 1.0,
        };
        let g = metrics.g_metric.matrix()[(0, 0)];
        let est = estimate_gamma_d(&p, &optimum, &metrics.g_metric, 7).unwrap();
        assert!((est.lower_estimate - 1.0 / g.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn gamma_d_disc_detects_unsharp_maximum() {
        let (p, optimum) = generators::disc2d().unwrap();
        let metrics = build_metrics_from(&p, p.y_start().clone()).unwrap();
        // near-boundary samples approaching y* along the circle
        let samples: Vec<Vec64> = (2..30)
            .map(|i| {
                let phi = 10f64.powf(-(i as f64) / 4.0);
                vec(&[phi.cos() * 0.999999, phi.sin() * 0.999999])
            })
            .collect();
        let est = estimate_gamma_d_over(&p, &optimum, &metrics.g_metric, &samples).unwrap();
        assert!(
            est.lower_estimate < 1e-3,
            "disc should not look sharp, got {}",
            est.lower_estimate
        );
    }

    #[test]
    fn gamma_d_parabola_radial_ladder_stays_positive() {
        let (p, optimum) = generators::parabola2d().unwrap();
        let metrics = build_metrics_from(&p, p.y_start().clone()).unwrap();
        let est = estimate_gamma_d(&p, &optimum, &metrics.g_metric, 11).unwrap();
        assert!(est.lower_estimate > 1e-3, "got {}", est.lower_estimate);
    }

    #[test]
    fn sigma_d_bounded_on_sharp_lp() {
        let (p, opt) = generators::sharp_lp(3, 7, 19).unwrap();
        let trace = solve(&p, &SolverConfig::with_epsilon(1e-10)).unwrap();
        let metrics = build_metrics_from(&p, p.y_start().clone()).unwrap();
        let est = sigma_d_from_trace(&p, &trace, &opt.s_star, &metrics.b_metric).unwrap();
        assert!(!est.diverging, "σ_d must stay bounded on sharp instances");
        assert!(est.max_norm.is_finite());
        // orthant estimate: the active set caps the norm at max n²/s*ᵢ scale
        let n = p.dim_slack() as f64;
        let min_active = opt
            .s_star
            .iter()
            .copied()
            .filter(|v| *v > 0.0)
            .fold(f64::INFINITY, f64::min);
        assert!(est.max_norm <= n * n / min_active * 10.0);
    }

    #[test]
    fn sigma_d_region_law_on_parabola_lift() {
        // ‖∇²F_*(s)s_*‖_B = (s₁² + s₂²)/ω² with ω = s₁s₃ − s₂² under the
        // weight ⟨Bx, x⟩ = x₁² + x₂²/2 + x₃² + x₄²
        let (p, opt) = generators::parabola2d().unwrap();
        let b_weights = SymOperator::new(DMatrix::from_diagonal(&vec(&[1.0, 0.5, 1.0, 1.0])))
            .unwrap();
        for y in [vec(&[2.0, 1.0]), vec(&[1.5, 0.5]), vec(&[0.8, 0.3])] {
            let s = p.slack(&y);
            let est = estimate_sigma_d(&p, &[(s.clone(), 1.0)], &opt.s_star, &b_weights)
                .unwrap();
            let omega = s[0] * s[2] - s[1] * s[1];
            let expect = (s[0] * s[0] + s[1] * s[1]) / (omega * omega);
            assert!(
                (est.max_norm - expect).abs() < 1e-10 * (1.0 + expect),
                "{} vs {expect}",
                est.max_norm
            );
        }
    }

    #[test]
    fn fd_check_all_barriers() {
        let mut rng = rng::stream(33, "fd-points");
        for cone in [
            ConeDescriptor::Orthant(4),
            ConeDescriptor::Psd(3),
            ConeDescriptor::Soc(4),
            ConeDescriptor::HankelPoly(4),
            ConeDescriptor::Disc2d,
            ConeDescriptor::Parabola2d,
        ] {
            let side = if matches!(
                cone,
                ConeDescriptor::HankelPoly(_) | ConeDescriptor::Disc2d | ConeDescriptor::Parabola2d
            ) {
                Side::Dual
            } else {
                Side::Primal
            };
            let oracle = BarrierOracle::new(cone.clone(), side).unwrap();
            let x = sampling::interior_point(&mut rng, &cone);
            for order in [FdOrder::Gradient, FdOrder::Hessian, FdOrder::Third] {
                let err = fd_check(&oracle, &x, order, 5).unwrap();
                assert!(
                    err <= order.threshold(),
                    "{cone} {order:?}: {err} > {}",
                    order.threshold()
                );
            }
        }
    }

    #[test]
    fn lemma_ell_cases() {
        let oracle = BarrierOracle::new(ConeDescriptor::Orthant(2), Side::Primal).unwrap();
        let x = vec(&[1.0, 1.0]);
        // H = ∇²F(x) with u = x: the Dikin ellipsoid is inside the cone and
        // 4ν² ≥ 1, so the bound holds
        let h = oracle.hessian(&x).unwrap();
        assert!(check_lemma_ell(&oracle, &x, &x, &h, 3).unwrap());
        // cor-Dik at base (2,2) with u = (1,1): ⟨∇F((2,2)), u − x⟩ = 1 ≥ 0
        // and the Dikin ellipsoid of u touches the boundary from inside
        let base = vec(&[2.0, 2.0]);
        let hu = oracle.hessian(&x).unwrap();
        assert!(check_lemma_ell(&oracle, &base, &x, &hu, 3).unwrap());
        // violated hypothesis is reported
        let err = check_lemma_ell(&oracle, &x, &vec(&[0.2, 0.2]), &h, 3).unwrap_err();
        assert!(matches!(err, DiagnosticsError::HypothesisNotSatisfied(_)));
    }

    #[test]
    fn lemma_ell_randomized_cor_dik() {
        let oracle = BarrierOracle::new(ConeDescriptor::Psd(3), Side::Primal).unwrap();
        let mut rng = rng::stream(40, "cor-dik");
        let mut checked = 0;
        for _ in 0..40 {
            let x = sampling::interior_point(&mut rng, oracle.cone());
            let u = sampling::interior_point(&mut rng, oracle.cone());
            let grad = oracle.gradient(&x).unwrap();
            if grad.dot(&(&u - &x)) < 0.0 {
                continue;
            }
            let hu = oracle.hessian(&u).unwrap();
            assert!(check_lemma_ell(&oracle, &x, &u, &hu, 9).unwrap());
            checked += 1;
        }
        assert!(checked > 3);
    }
}
