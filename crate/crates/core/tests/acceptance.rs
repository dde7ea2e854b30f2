//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use conepredictor::cones::{sampling, BarrierOracle, ConeDescriptor, Side};
use conepredictor::diagnostics::{
    self, fd_check, fit_tail_exponent, negative_curvature_report, FdOrder, TailWindow,
};
use conepredictor::generators;
use conepredictor::geometry::{self, ConicProblem, KnownOptimum};
use conepredictor::linalg::{NormSide, Vec64};
use conepredictor::rng;
use conepredictor::solver::{solve, ConvergenceTrace, SolverConfig};
use std::sync::OnceLock;
use std::time::Instant;

const SEED: u64 = 0x5eed_ace1;

struct Run {
    name: String,
    problem: ConicProblem,
    optimum: KnownOptimum,
    trace: ConvergenceTrace,
    solve_seconds: f64,
}

fn sharp_runs() -> &'static Vec<Run> {
    static RUNS: OnceLock<Vec<Run>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut runs = Vec::new();
        let sizes = [(2usize, 5usize), (3, 6), (3, 7), (4, 8)];
        for i in 0..20 {
            let (m, n) = sizes[i % sizes.len()];
            let seed = SEED + i as u64;
            let (problem, optimum) = generators::sharp_lp(m, n, seed).unwrap();
            // certify the constructed optimum by brute-force vertex
            // enumeration before the instance enters any criterion
            let (y_vertex, f_vertex) =
                generators::lp_vertex_optimum(&problem).expect("feasible vertex");
            assert!(
                (f_vertex - optimum.f_star).abs() <= 1e-8 * (1.0 + f_vertex.abs())
                    && (&y_vertex - &optimum.y_star).amax() < 1e-8,
                "sharp_lp({m},{n},{seed}): vertex oracle disagrees"
            );
            let started = Instant::now();
            let trace = solve(&problem, &SolverConfig::with_epsilon(1e-12))
                .unwrap_or_else(|e| panic!("sharp_lp({m},{n},{seed}) failed: {e}"));
            runs.push(Run {
                name: format!("sharp_lp({m},{n}) seed {seed}"),
                problem,
                optimum,
                trace,
                solve_seconds: started.elapsed().as_secs_f64(),
            });
        }
        for i in 0..5 {
            let n = if i < 3 { 3 } else { 4 };
            let seed = SEED + 100 + i as u64;
            let (problem, optimum) = generators::sharp_sdp(n, seed).unwrap();
            let started = Instant::now();
            let trace = solve(&problem, &SolverConfig::with_epsilon(1e-12))
                .unwrap_or_else(|e| panic!("sharp_sdp({n},{seed}) failed: {e}"));
            runs.push(Run {
                name: format!("sharp_sdp({n}) seed {seed}"),
                problem,
                optimum,
                trace,
                solve_seconds: started.elapsed().as_secs_f64(),
            });
        }
        runs
    })
}

fn disc_run() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let (problem, optimum) = generators::disc2d().unwrap();
        let started = Instant::now();
        // the disc's boundary margin is a cancellation of O(1) terms, which
        // floors certifiable centering near μ ≈ 1e-7; ε = 1e-6 stays above it
        let trace = solve(&problem, &SolverConfig::with_epsilon(1e-6)).unwrap();
        Run {
            name: "disc2d".into(),
            problem,
            optimum,
            trace,
            solve_seconds: started.elapsed().as_secs_f64(),
        }
    })
}

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id:02} [{name}] {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02} [{name}] failed: {detail}");
}

fn criterion_families() -> Vec<(ConeDescriptor, Side)> {
    vec![
        (ConeDescriptor::Orthant(10), Side::Primal),
        (ConeDescriptor::Psd(6), Side::Primal),
        (ConeDescriptor::Soc(8), Side::Primal),
        (
            ConeDescriptor::Product(vec![
                ConeDescriptor::Orthant(3),
                ConeDescriptor::Soc(4),
                ConeDescriptor::Psd(3),
            ]),
            Side::Primal,
        ),
        (ConeDescriptor::HankelPoly(6), Side::Dual),
    ]
}

#[test]
fn criterion_01_barrier_identities() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for (cone, side) in criterion_families() {
        let oracle = BarrierOracle::new(cone.clone(), side).unwrap();
        let nu = oracle.nu();
        let mut rng = rng::stream(SEED ^ 1, &format!("identities-{cone}"));
        for _ in 0..100 {
            let x = sampling::interior_point(&mut rng, &cone);
            let grad = oracle.gradient(&x).unwrap();
            let hess = oracle.hessian(&x).unwrap();
            // ⟨∇F(x), x⟩ = −ν
            worst = worst.max((grad.dot(&x) + nu).abs() / nu);
            // ∇²F(x)x = −∇F(x)
            let hx = hess.matrix() * &x;
            worst = worst.max((&hx + &grad).norm() / (1.0 + grad.norm()));
            // ∇³F(x)[x] = −2∇²F(x)
            let third = oracle.third_directional(&x, &x).unwrap();
            worst = worst.max(
                (third.matrix() + 2.0 * hess.matrix()).amax()
                    / (1.0 + hess.matrix().amax()),
            );
            // ‖∇F(x)‖²_x = ν
            let nd = hess.inv_quad_form(&grad).unwrap();
            worst = worst.max((nd - nu).abs() / nu);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    report(
        1,
        "barrier-identity-suite",
        worst <= 1e-8 && secs < 10.0,
        &format!("max_rel_err={worst:.3e} runtime={secs:.2}s"),
    );
}

#[test]
fn criterion_02_negative_curvature() {
    let started = Instant::now();
    let mut worst_line = String::new();
    let mut pass = true;
    for (cone, _) in criterion_families() {
        let lines = negative_curvature_report(&cone, SEED ^ 2, 100).unwrap();
        for line in lines {
            if !line.pass {
                pass = false;
                worst_line = format!("{cone}: {line}");
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    report(
        2,
        "negative-curvature-suite",
        pass && secs < 30.0,
        &format!("runtime={secs:.2}s {worst_line}"),
    );
}

#[test]
fn criterion_03_disc_closed_forms() {
    let (problem, _) = generators::disc2d().unwrap();
    let mut worst_theta = 0.0f64;
    let mut worst_pred = 0.0f64;
    let mut membership_ok = true;
    let grid = 50;
    for i in 0..grid {
        for j in 0..grid {
            let y1 = -0.98 + 1.96 * (i as f64 + 0.5) / grid as f64;
            let y2 = -0.98 + 1.96 * (j as f64 + 0.5) / grid as f64;
            let y = Vec64::from_row_slice(&[y1, y2]);
            if y.norm() > 0.97 {
                continue;
            }
            let theta = geometry::theta(&problem, &y).unwrap();
            let theta2_expected = 2.0 * y2 * y2 / (1.0 - y1 * y1 + y2 * y2);
            worst_theta = worst_theta.max((theta * theta - theta2_expected).abs());

            let p = geometry::prediction_point(&problem, &y).unwrap();
            let expect = &y * (2.0 / (1.0 + y.norm_squared()));
            worst_pred = worst_pred.max((&p - &expect).amax());

            // M(β) membership ⟺ the ellipse y₁² + (2−β²)/β²·y₂² ≤ 1
            for beta in [0.1, 0.3, 0.5] {
                let ellipse = y1 * y1 + (2.0 - beta * beta) / (beta * beta) * y2 * y2;
                let in_neighborhood = theta <= beta;
                if (ellipse - 1.0).abs() > 1e-9 {
                    membership_ok &= in_neighborhood == (ellipse <= 1.0);
                }
            }
        }
    }
    report(
        3,
        "disc-closed-forms",
        worst_theta <= 1e-10 && worst_pred <= 1e-10 && membership_ok,
        &format!("theta2_err={worst_theta:.3e} pred_err={worst_pred:.3e} membership_ok={membership_ok}"),
    );
}

#[test]
fn criterion_04_parabola_central_path() {
    let (problem, _) = generators::parabola2d().unwrap();
    let mus = [1.0, 0.1, 0.01, 0.001];
    let path = diagnostics::centered_path(&problem, &mus, 1e-10).unwrap();
    let mut worst = 0.0f64;
    for it in &path {
        assert!(it.gamma <= 1e-10);
        let (y1, y2) = (it.y[0], it.y[1]);
        worst = worst.max((y1 - 3.0 * y2 * y2).abs() / y1.abs());
    }
    report(
        4,
        "parabola-characteristic-equation",
        worst <= 1e-7,
        &format!("max_rel_err={worst:.3e}"),
    );
}

#[test]
fn criterion_05_gap_identity() {
    let mut worst_rel = 0.0f64;
    let mut bound_ok = true;
    // centered gap = νμ on one LP and one SDP instance
    for (name, n) in [("sharp_lp", None), ("sharp_sdp", Some(3))] {
        let params = generators::GenParams {
            n,
            seed: SEED + 9,
            ..Default::default()
        };
        let (problem, _) = generators::generate_example(name, &params).unwrap();
        let nu = problem.nu();
        let mus = [1.0, 0.5, 0.1, 0.01];
        let path = diagnostics::centered_path(&problem, &mus, 1e-10).unwrap();
        for it in &path {
            let res = geometry::central_path_residuals(&problem, &it.y, it.mu).unwrap();
            let direct = problem.c().dot(&res.x) - problem.dual_objective(&it.y);
            worst_rel = worst_rel.max((direct - nu * it.mu).abs() / (nu * it.mu));
            assert!(res.primal_residual <= 1e-7 * (1.0 + problem.b().norm()));
        }
    }
    // κ₁μ certified bound at every neighborhood iterate of the sharp runs
    for run in sharp_runs() {
        for r in &run.trace.records {
            let true_gap = run.optimum.f_star - r.dual_objective;
            if true_gap > r.gap_bound * (1.0 + 1e-6) + 1e-13 {
                bound_ok = false;
            }
        }
    }
    report(
        5,
        "central-path-gap-identity",
        worst_rel <= 1e-7 && bound_ok,
        &format!("max_rel_err={worst_rel:.3e} kappa1_bound_ok={bound_ok}"),
    );
}

#[test]
fn criterion_06_global_linear_rate() {
    let mut violations = 0usize;
    let mut max_secs = 0.0f64;
    for run in sharp_runs() {
        let mus = run.trace.mu_sequence();
        let flags = diagnostics::check_linear_rate(&mus, run.problem.nu());
        violations += flags.iter().filter(|ok| !**ok).count();
        max_secs = max_secs.max(run.solve_seconds);
        assert!(*mus.last().unwrap() <= 1e-12 / run.problem.nu());
        assert!(mus.windows(2).all(|w| w[1] < w[0]), "μ not strictly decreasing");
    }
    report(
        6,
        "global-linear-rate",
        violations == 0,
        &format!(
            "violations={violations} instances={} max_solve={max_secs:.2}s",
            sharp_runs().len()
        ),
    );
}

#[test]
fn criterion_07_local_superlinear_rate() {
    let window = TailWindow::default();
    let mut min_exponent = f64::INFINITY;
    let mut max_secs = 0.0f64;
    for run in sharp_runs() {
        let mus = run.trace.mu_sequence();
        let fit = fit_tail_exponent(&mus, &window)
            .unwrap_or_else(|e| panic!("{}: {e}", run.name));
        min_exponent = min_exponent.min(fit.tail_exponent);
        max_secs = max_secs.max(run.solve_seconds);
    }
    let disc = disc_run();
    let disc_fit = fit_tail_exponent(&disc.trace.mu_sequence(), &window).unwrap();
    max_secs = max_secs.max(disc.solve_seconds);
    report(
        7,
        "local-superlinear-rate",
        min_exponent >= 1.4 && disc_fit.tail_exponent < 1.2 && max_secs < 5.0,
        &format!(
            "sharp_min_exponent={min_exponent:.3} disc_exponent={:.3} max_solve={max_secs:.2}s",
            disc_fit.tail_exponent
        ),
    );
}

#[test]
fn criterion_08_quadratic_prediction() {
    let mut min_slope = f64::INFINITY;
    let mut compared = 0usize;
    for run in sharp_runs().iter().filter(|r| r.name.starts_with("sharp_lp")) {
        let metrics =
            diagnostics::build_metrics_from(&run.problem, run.problem.y_start().clone())
                .unwrap();
        let mut pts = Vec::new();
        for r in &run.trace.records {
            let dist = metrics
                .g_metric
                .weighted_norm(&(&r.y - &run.optimum.y_star), NormSide::Primal)
                .unwrap();
            // below ~1e-6 the squared distance sits at the f64 floor
            if !(1e-6..=3e-2).contains(&dist) {
                continue;
            }
            let p = geometry::prediction_point(&run.problem, &r.y).unwrap();
            let pdist = metrics
                .g_metric
                .weighted_norm(&(&p - &run.optimum.y_star), NormSide::Primal)
                .unwrap();
            if pdist > 0.0 {
                pts.push((dist.ln(), pdist.ln()));
            }
        }
        if pts.len() < 5 {
            continue;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let var: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        min_slope = min_slope.min(cov / var);
        compared += 1;
    }
    report(
        8,
        "quadratic-prediction",
        compared >= 10 && min_slope >= 1.8,
        &format!("min_slope={min_slope:.3} instances={compared}"),
    );
}

#[test]
fn criterion_09_null_identity_residual() {
    let mut worst = 0.0f64;
    // conic instances only: the identity is a consequence of logarithmic
    // homogeneity, which the disc region barrier does not have
    let all: Vec<&Run> = sharp_runs().iter().collect();
    for run in all {
        // initial iterate plus every stored iterate, at the solver's slacks
        let mut slacks = vec![run.trace.initial.slack.clone()];
        slacks.extend(run.trace.records.iter().map(|r| r.slack.clone()));
        for s in slacks {
            let res = geometry::null_identity_residual_at(&run.problem, &s).unwrap();
            let grad = -run.problem.a().apply(&run.problem.oracle().gradient(&s).unwrap());
            // the identity cancels terms of size ‖∇f‖, so that scale enters
            let rel = res / ((1.0 + s.norm()) * (1.0 + grad.norm()));
            worst = worst.max(rel);
        }
    }
    report(
        9,
        "predicted-slack-null-identity",
        worst <= 1e-8,
        &format!("max_scaled_residual={worst:.3e}"),
    );
}

#[test]
fn criterion_10_predictor_xi_doubling() {
    let mut worst_defect = f64::NEG_INFINITY;
    for run in sharp_runs() {
        for r in &run.trace.records {
            for (i, trial) in r.trials.iter().enumerate() {
                let xi_i = geometry::xi(r.alpha_bar, trial.alpha).unwrap();
                let bound = 1.0 + r.alpha0 * 2f64.powi(i as i32);
                worst_defect = worst_defect.max(bound - xi_i);
            }
        }
    }
    report(
        10,
        "predictor-xi-doubling",
        worst_defect <= 1e-12,
        &format!("max_defect={worst_defect:.3e}"),
    );
}

#[test]
fn criterion_11_initial_step_never_rejected() {
    let mut rejected = 0usize;
    let mut searches = 0usize;
    let mut all: Vec<&Run> = sharp_runs().iter().collect();
    all.push(disc_run());
    for run in all {
        for r in &run.trace.records {
            searches += 1;
            let first = &r.trials[0];
            if !(first.passed
                && first.gamma_big.is_some_and(|g| g <= 1.0 / 6.0 + 1e-12))
            {
                rejected += 1;
            }
        }
    }
    report(
        11,
        "initial-predictor-step-accepted",
        rejected == 0 && searches > 0,
        &format!("rejections={rejected} searches={searches}"),
    );
}

#[test]
fn criterion_12_finite_difference_agreement() {
    let barriers: Vec<(ConeDescriptor, Side)> = vec![
        (ConeDescriptor::Orthant(5), Side::Primal),
        (ConeDescriptor::Psd(4), Side::Primal),
        (ConeDescriptor::Soc(5), Side::Primal),
        (
            ConeDescriptor::Product(vec![
                ConeDescriptor::Orthant(2),
                ConeDescriptor::Soc(3),
                ConeDescriptor::Psd(2),
            ]),
            Side::Primal,
        ),
        (ConeDescriptor::HankelPoly(4), Side::Dual),
        (ConeDescriptor::Disc2d, Side::Dual),
        (ConeDescriptor::Parabola2d, Side::Dual),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (cone, side) in barriers {
        let oracle = BarrierOracle::new(cone.clone(), side).unwrap();
        let mut rng = rng::stream(SEED ^ 12, &format!("fd-{cone}"));
        for trial in 0..5 {
            let x = sampling::interior_point(&mut rng, &cone);
            for order in [FdOrder::Gradient, FdOrder::Hessian, FdOrder::Third] {
                let err = fd_check(&oracle, &x, order, SEED + trial).unwrap();
                if err > order.threshold() {
                    pass = false;
                    detail = format!("{cone} {order:?} err={err:.3e}");
                }
            }
        }
    }
    report(12, "finite-difference-agreement", pass, &detail);
}
