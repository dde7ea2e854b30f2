//! Python bindings: problems, the path-following solver, traces, and the
//! barrier certification suites.

use conepredictor::cones::parse_descriptor;
use conepredictor::diagnostics::{self, TailWindow};
use conepredictor::generators::{self, GenParams};
use conepredictor::geometry::{self, KnownOptimum};
use conepredictor::io;
use conepredictor::linalg::Vec64;
use conepredictor::solver::{self, SolverConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn vec64(v: Vec<f64>) -> Vec64 {
    Vec64::from_vec(v)
}

fn to_vec(v: &Vec64) -> Vec<f64> {
    v.iter().copied().collect()
}

/// A conic problem max{⟨b, y⟩ : c − A*y ∈ K*} with a strictly feasible dual
/// start point and, when constructed from a generator, the known optimum.
#[pyclass(name = "Problem")]
struct PyProblem {
    inner: geometry::ConicProblem,
    optimum: Option<KnownOptimum>,
}

#[pymethods]
impl PyProblem {
    /// Parse a CONEPROB 1 document.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let (inner, optimum) =
            io::parse_problem(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyProblem { inner, optimum })
    }

    /// Generate a named example (parabola2d, disc2d, sharp_lp, sharp_sdp,
    /// soc_test, hankel_poly).
    #[staticmethod]
    #[pyo3(signature = (name, m=None, n=None, seed=None))]
    fn from_example(name: &str, m: Option<usize>, n: Option<usize>, seed: Option<u64>) -> PyResult<Self> {
        let params = GenParams {
            m,
            n,
            seed: seed.unwrap_or(conepredictor::rng::DEFAULT_SEED),
        };
        let (inner, optimum) = generators::generate_example(name, &params)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyProblem { inner, optimum })
    }

    fn to_text(&self) -> String {
        io::write_problem(&self.inner, self.optimum.as_ref())
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu()
    }

    #[getter]
    fn dim_y(&self) -> usize {
        self.inner.dim_y()
    }

    #[getter]
    fn dim_slack(&self) -> usize {
        self.inner.dim_slack()
    }

    #[getter]
    fn cone(&self) -> String {
        self.inner.cone().to_string()
    }

    #[getter]
    fn y_start(&self) -> Vec<f64> {
        to_vec(self.inner.y_start())
    }

    #[getter]
    fn y_star(&self) -> Option<Vec<f64>> {
        self.optimum.as_ref().map(|o| to_vec(&o.y_star))
    }

    #[getter]
    fn f_star(&self) -> Option<f64> {
        self.optimum.as_ref().map(|o| o.f_star)
    }

    fn slack(&self, y: Vec<f64>) -> (Vec<f64>, bool) {
        let (s, interior) = geometry::slack(&self.inner, &vec64(y));
        (to_vec(&s), interior)
    }

    fn dual_objective(&self, y: Vec<f64>) -> f64 {
        self.inner.dual_objective(&vec64(y))
    }

    /// γ(y, μ): the gradient proximity measure / Newton decrement.
    fn proximity(&self, y: Vec<f64>, mu: f64) -> PyResult<f64> {
        geometry::proximity_gamma(&self.inner, &vec64(y), mu)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// θ(y) = min_t ‖∇f(y) − t b‖_y.
    fn theta(&self, y: Vec<f64>) -> PyResult<f64> {
        geometry::theta(&self.inner, &vec64(y))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn predictor_direction(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        geometry::predictor_direction(&self.inner, &vec64(y))
            .map(|v| to_vec(&v))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn prediction_point(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        geometry::prediction_point(&self.inner, &vec64(y))
            .map(|v| to_vec(&v))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn max_feasible_step(&self, y: Vec<f64>) -> PyResult<f64> {
        geometry::max_feasible_step(&self.inner, &vec64(y))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Per-iteration record of a solve: (k, mu, alpha_bar, alpha, i_k, gamma_pre,
/// gamma_post, corrector_steps, dual_obj, gap_bound).
#[pyclass(name = "Trace")]
struct PyTrace {
    inner: solver::ConvergenceTrace,
}

#[pymethods]
impl PyTrace {
    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    /// μ₀ = 1 followed by the per-iteration penalties.
    fn mu_sequence(&self) -> Vec<f64> {
        self.inner.mu_sequence()
    }

    #[getter]
    fn final_mu(&self) -> f64 {
        self.inner.final_mu()
    }

    #[getter]
    fn dual_objective(&self) -> f64 {
        self.inner.dual_objective()
    }

    #[getter]
    fn gap_bound(&self) -> f64 {
        self.inner.records.last().map_or(f64::NAN, |r| r.gap_bound)
    }

    fn final_y(&self) -> Vec<f64> {
        to_vec(&self.inner.final_iterate().y)
    }

    #[allow(clippy::type_complexity)] // mirrors the CSV row layout
    fn rows(&self) -> Vec<(usize, f64, f64, f64, usize, f64, f64, usize, f64, f64)> {
        self.inner
            .records
            .iter()
            .map(|r| {
                (
                    r.k,
                    r.mu,
                    r.alpha_bar,
                    r.alpha,
                    r.trial_index,
                    r.gamma_pre,
                    r.gamma_post,
                    r.corrector_steps,
                    r.dual_objective,
                    r.gap_bound,
                )
            })
            .collect()
    }

    fn to_csv(&self) -> String {
        io::write_trace_csv(&self.inner)
    }

    /// Least-squares tail exponent of log μ₊ against log μ.
    #[pyo3(signature = (mu_upper=1e-4, mu_floor=1e-12, min_pairs=5))]
    fn tail_exponent(&self, mu_upper: f64, mu_floor: f64, min_pairs: usize) -> PyResult<(f64, f64, usize)> {
        let window = TailWindow {
            mu_upper,
            mu_floor,
            min_pairs,
        };
        let report = diagnostics::fit_tail_exponent(&self.inner.mu_sequence(), &window)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((report.tail_exponent, report.tail_constant, report.pairs))
    }

    /// Per-step flags for the global linear rate μ₊ ≤ (1 + 1/(6√ν))⁻¹μ.
    fn linear_rate_flags(&self) -> Vec<bool> {
        diagnostics::check_linear_rate(&self.inner.mu_sequence(), self.inner.nu)
    }
}

/// Run the dual predictor-corrector method.
#[pyfunction]
#[pyo3(signature = (problem, eps=1e-8, max_iter=600))]
fn solve(problem: &PyProblem, eps: f64, max_iter: usize) -> PyResult<PyTrace> {
    let config = SolverConfig {
        epsilon: eps,
        max_outer_iterations: max_iter,
        ..Default::default()
    };
    solver::solve(&problem.inner, &config)
        .map(|inner| PyTrace { inner })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Barrier identity / curvature report for a cone, as
/// (name, value, threshold, pass) tuples.
#[pyfunction]
#[pyo3(signature = (cone, seed=1, samples=50))]
fn check_barrier(cone: &str, seed: u64, samples: usize) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let descriptor =
        parse_descriptor(cone).map_err(|m| PyValueError::new_err(format!("bad cone: {m}")))?;
    let mut lines = diagnostics::barrier_identity_report(&descriptor, seed, samples)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    if descriptor.is_cone() {
        lines.extend(
            diagnostics::negative_curvature_report(&descriptor, seed ^ 0x5eed, samples)
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?,
        );
    }
    Ok(lines
        .into_iter()
        .map(|l| (l.name, l.value, l.threshold, l.pass))
        .collect())
}

/// Penalty division factor ξ_ᾱ(α) = 1 + αᾱ/(ᾱ − α).
#[pyfunction]
fn xi(alpha_bar: f64, alpha: f64) -> PyResult<f64> {
    geometry::xi(alpha_bar, alpha).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Predictor step-length update η_ᾱ(α).
#[pyfunction]
fn eta(alpha_bar: f64, alpha: f64) -> f64 {
    geometry::eta(alpha_bar, alpha)
}

#[pymodule]
fn conepredictor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check_barrier, m)?)?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add("DEFAULT_SEED", conepredictor::rng::DEFAULT_SEED)?;
    Ok(())
}
