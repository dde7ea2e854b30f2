//! Command-line surface: solve, check-barrier, estimate, rates, gen,
//! version. Exit code 0 on success, 1 on solver failure, 2 on usage or
//! parse errors.

use crate::cones::{parse_descriptor, ConeDescriptor};
use crate::diagnostics::{self, TailWindow};
use crate::generators::{self, GenParams};
use crate::geometry::KnownOptimum;
use crate::io;
use crate::rng;
use crate::solver::{self, SolverConfig};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

pub const SEED_ENV: &str = "CONEPREDICTOR_SEED";

#[derive(Parser)]
#[command(name = "conepredictor", disable_version_flag = true)]
#[command(about = "Dual predictor-corrector path following for conic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a CONEPROB file
    Solve(SolveArgs),
    /// Run the barrier identity / curvature suites for one cone
    CheckBarrier(CheckBarrierArgs),
    /// Estimate assumption constants for a problem from a solve trace
    Estimate(EstimateArgs),
    /// Rate analysis of a trace CSV
    Rates(RatesArgs),
    /// Generate an example problem file
    Gen(GenArgs),
    /// Print the version
    Version,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Target absolute accuracy ε (stop at μ ≤ ε/ν)
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 600)]
    max_iter: usize,
    /// Write the iteration trace as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CheckBarrierArgs {
    /// Cone, e.g. `psd3`, `orthant(4)`, `product(orthant(2),soc(3))`
    cone: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    samples: usize,
}

#[derive(Args)]
struct EstimateArgs {
    file: PathBuf,
    /// Trace CSV produced by `solve --trace`
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Upper μ of the tail window
    #[arg(long, default_value_t = 1e-4)]
    window: f64,
    /// Barrier parameter for the linear-rate flags
    #[arg(long)]
    nu: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    /// One of: parabola2d, disc2d, sharp_lp, sharp_sdp, soc_test, hankel_poly
    example: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
}

fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(rng::DEFAULT_SEED)
}

/// Parses either the canonical descriptor syntax or the compact CLI form
/// (`psd3`, `soc5`, `hankel6`).
fn parse_cone_arg(text: &str) -> Result<ConeDescriptor, String> {
    if let Ok(d) = parse_descriptor(text) {
        return Ok(d);
    }
    let split = text.find(|c: char| c.is_ascii_digit());
    match split {
        Some(i) => parse_descriptor(&format!("{}({})", &text[..i], &text[i..])),
        None => parse_descriptor(text),
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own help/version output with code 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Version => {
            println!("conepredictor {}", env!("CARGO_PKG_VERSION"));
            0
        }
        Command::Solve(args) => cmd_solve(args),
        Command::CheckBarrier(args) => cmd_check_barrier(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Rates(args) => cmd_rates(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn read_problem(
    path: &PathBuf,
) -> Result<(crate::geometry::ConicProblem, Option<KnownOptimum>), i32> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(2);
        }
    };
    match io::parse_problem(&text) {
        Ok(p) => Ok(p),
        Err(e @ io::ParseError::InfeasibleStart) => {
            eprintln!("error: {e}");
            Err(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(2)
        }
    }
}

fn cmd_solve(args: SolveArgs) -> i32 {
    let (problem, _optimum) = match read_problem(&args.file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let config = SolverConfig {
        epsilon: args.eps,
        max_outer_iterations: args.max_iter,
        ..Default::default()
    };
    match solver::solve(&problem, &config) {
        Ok(trace) => {
            println!(
                "solved: iterations={} mu={:.3e} dual_obj={:.12e} gap_bound={:.3e}",
                trace.records.len(),
                trace.final_mu(),
                trace.dual_objective(),
                trace.records.last().map_or(f64::NAN, |r| r.gap_bound),
            );
            if let Some(path) = args.trace {
                let csv = io::write_trace_csv(&trace);
                if let Err(e) = io::write_file_atomic(&path, &csv) {
                    eprintln!("error: cannot write trace: {e}");
                    return 1;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("solver failed: {e}");
            1
        }
    }
}

fn cmd_check_barrier(args: CheckBarrierArgs) -> i32 {
    let cone = match parse_cone_arg(&args.cone) {
        Ok(c) => c,
        Err(m) => {
            eprintln!("error: bad cone '{}': {m}", args.cone);
            return 2;
        }
    };
    let seed = args.seed.unwrap_or_else(default_seed);
    let mut lines = Vec::new();
    match diagnostics::barrier_identity_report(&cone, seed, args.samples) {
        Ok(mut l) => lines.append(&mut l),
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    }
    if cone.is_cone() {
        match diagnostics::negative_curvature_report(&cone, seed ^ 0x5eed, args.samples) {
            Ok(mut l) => lines.append(&mut l),
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
        match diagnostics::dikin_recession_report(&cone, seed ^ 0xd1c1, args.samples) {
            Ok(mut l) => lines.append(&mut l),
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    }
    let mut ok = true;
    for line in &lines {
        println!("{line}");
        ok &= line.pass;
    }
    if ok {
        0
    } else {
        1
    }
}

fn cmd_estimate(args: EstimateArgs) -> i32 {
    let (problem, optimum) = match read_problem(&args.file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let rows = match std::fs::read_to_string(&args.trace)
        .map_err(io::ParseError::from)
        .and_then(|t| io::parse_trace_csv(&t))
    {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let seed = args.seed.unwrap_or_else(default_seed);
    let metrics = match diagnostics::build_metrics_from(&problem, problem.y_start().clone()) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match diagnostics::operator_bound_report(&problem, &metrics, seed, 64) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    }
    let nu = problem.nu();
    let Some(optimum) = optimum else {
        eprintln!("error: known optimum required for constant estimation");
        return 1;
    };
    let gamma_d = match diagnostics::estimate_gamma_d(&problem, &optimum, &metrics.g_metric, seed)
    {
        Ok(g) => {
            println!(
                "name=gamma_d_regional_lower value={:.9e} threshold=0.0 status={}",
                g.lower_estimate,
                if g.lower_estimate > 0.0 { "PASS" } else { "FAIL" }
            );
            g.lower_estimate
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    // re-center along the recorded μ ladder for the boundedness estimate
    let mus: Vec<f64> = rows.iter().map(|r| r.mu).filter(|&m| m >= 1e-10).collect();
    let path = match diagnostics::centered_path(&problem, &mus, 1e-10) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let iterates: Vec<_> = path.iter().map(|it| (it.s.clone(), it.mu)).collect();
    let sigma_d = match diagnostics::estimate_sigma_d(
        &problem,
        &iterates,
        &optimum.s_star,
        &metrics.b_metric,
    ) {
        Ok(s) => {
            println!(
                "name=sigma_d_estimate value={:.9e} threshold=inf status={}",
                s.max_norm,
                if s.diverging { "FAIL" } else { "PASS" }
            );
            s.max_norm
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if gamma_d > 0.0 {
        let beta = 1.0 / 25.0;
        match diagnostics::constants(nu, gamma_d, sigma_d, beta, 1.0, 0.5) {
            Ok(c) => {
                println!("name=kappa1 value={:.9e} threshold=inf status=PASS", c.kappa1);
                println!("name=kappa2 value={:.9e} threshold=inf status=PASS", c.kappa2);
                println!("name=kappa3 value={:.9e} threshold=inf status=PASS", c.kappa3);
                println!("name=kappa value={:.9e} threshold=inf status=PASS", c.kappa);
                let c0 = diagnostics::c0_constant(nu, gamma_d, sigma_d, c.kappa1, c.kappa);
                let c1 = diagnostics::c1_constant(nu, c0, 1.0 / 6.0);
                println!("name=c0 value={c0:.9e} threshold=inf status=PASS");
                println!("name=c1 value={c1:.9e} threshold=inf status=PASS");
                if let Some(last) = rows.last() {
                    let xi = diagnostics::xi_equation_root(c0, nu, 1.0 / 6.0, last.mu.max(1e-14));
                    println!("name=xi_equation_root value={xi:.9e} threshold=inf status=PASS");
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    }
    0
}

fn cmd_rates(args: RatesArgs) -> i32 {
    let rows = match std::fs::read_to_string(&args.trace)
        .map_err(io::ParseError::from)
        .and_then(|t| io::parse_trace_csv(&t))
    {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut mus = vec![1.0];
    mus.extend(rows.iter().map(|r| r.mu));
    let window = TailWindow {
        mu_upper: args.window,
        ..Default::default()
    };
    match diagnostics::fit_tail_exponent(&mus, &window) {
        Ok(r) => {
            println!(
                "name=tail_exponent value={:.6} threshold=1.0 status={}",
                r.tail_exponent,
                if r.tail_exponent >= 1.0 { "PASS" } else { "FAIL" }
            );
            println!(
                "name=tail_constant value={:.9e} threshold=inf status=PASS",
                r.tail_constant
            );
            println!(
                "name=tail_pairs value={} threshold=4 status=PASS",
                r.pairs
            );
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    }
    if let Some(nu) = args.nu {
        let flags = diagnostics::check_linear_rate(&mus, nu);
        let violations = flags.iter().filter(|ok| !**ok).count();
        println!(
            "name=linear_rate_violations value={violations} threshold=0 status={}",
            if violations == 0 { "PASS" } else { "FAIL" }
        );
    }
    0
}

fn cmd_gen(args: GenArgs) -> i32 {
    let params = GenParams {
        m: args.m,
        n: args.n,
        seed: args.seed.unwrap_or_else(default_seed),
    };
    match generators::generate_example(&args.example, &params) {
        Ok((problem, optimum)) => {
            let text = io::write_problem(&problem, optimum.as_ref());
            if let Err(e) = io::write_file_atomic(&args.output, &text) {
                eprintln!("error: cannot write {}: {e}", args.output.display());
                return 1;
            }
            0
        }
        Err(generators::GenerateError::UnknownExample(name)) => {
            eprintln!(
                "error: unknown example '{name}', choose one of {}",
                generators::EXAMPLE_NAMES.join(", ")
            );
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
